//! Finite metric spaces and problem instances.
//!
//! Distances live in a dense row-major `n × n` matrix. A [`MetricSpace`] can
//! be built from Euclidean points, from the shortest-path closure of a
//! weighted graph, or from an explicit matrix; [`MetricSpace::validate`]
//! reports every violated axiom.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::SLACK_REL;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    n: usize,
    dist: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl MetricSpace {
    /// Wraps an explicit square matrix. Entries must be finite and
    /// non-negative; metric axioms are not enforced here (see [`validate`]).
    ///
    /// [`validate`]: MetricSpace::validate
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::input("distance matrix is empty"));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::input(format!(
                    "distance matrix row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::input(format!("dist[{i}][{j}] = {v} is not a finite non-negative number")));
                }
            }
            dist.extend(row);
        }
        Ok(MetricSpace { n, dist, labels: None })
    }

    /// Pairwise Euclidean distances.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let first = points.first().ok_or_else(|| Error::input("point set is empty"))?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::input("points must have dimension at least 1"));
        }
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { index, expected: dim, found: p.len() });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::input(format!("point {index} has a non-finite coordinate")));
            }
        }
        let n = points.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Ok(MetricSpace { n, dist, labels: None })
    }

    /// Shortest-path closure of an undirected weighted graph (Floyd–Warshall).
    pub fn from_graph(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("graph has no nodes"));
        }
        let mut dist = vec![f64::INFINITY; n * n];
        for i in 0..n {
            dist[i * n + i] = 0.0;
        }
        for &(a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::input(format!("edge ({a}, {b}) references a node outside 0..{n}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::input(format!("edge ({a}, {b}) has invalid weight {w}")));
            }
            if a != b && w < dist[a * n + b] {
                dist[a * n + b] = w;
                dist[b * n + a] = w;
            }
        }
        for via in 0..n {
            for i in 0..n {
                let d_iv = dist[i * n + via];
                if d_iv.is_infinite() {
                    continue;
                }
                // upper triangle only, mirrored, so the result is symmetric bit for bit
                for j in (i + 1)..n {
                    let cand = d_iv + dist[via * n + j];
                    if cand < dist[i * n + j] {
                        dist[i * n + j] = cand;
                        dist[j * n + i] = cand;
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if dist[i * n + j].is_infinite() {
                    return Err(Error::Disconnected { from: i, to: j });
                }
            }
        }
        Ok(MetricSpace { n, dist, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::input(format!("{} labels given for {} points", labels.len(), self.n)));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Checks the metric axioms. Triangle violations are reported when
    /// `d(i,j) > d(i,k) + d(k,j) + 1e-9·max(1, d(i,j), d(i,k) + d(k,j))`.
    pub fn validate(&self) -> ValidationReport {
        let n = self.n;
        let mut violations = Vec::new();
        for i in 0..n {
            let v = self.d(i, i);
            if v != 0.0 {
                violations.push(Violation::Diagonal { i, value: v });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = self.d(i, j);
                if !v.is_finite() || v < 0.0 {
                    violations.push(Violation::Negative { i, j, value: v });
                }
                if i < j {
                    let (a, b) = (v, self.d(j, i));
                    if (a - b).abs() > SLACK_REL * 1f64.max(a.abs()).max(b.abs()) {
                        violations.push(Violation::Asymmetric { i, j, forward: a, backward: b });
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let direct = self.d(i, j);
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let detour = self.d(i, k) + self.d(k, j);
                    if direct > detour + SLACK_REL * 1f64.max(direct).max(detour) {
                        violations.push(Violation::Triangle { i, k, j, direct, detour });
                    }
                }
            }
        }
        ValidationReport { violations }
    }
}

/// A single failed metric axiom.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    Diagonal { i: usize, value: f64 },
    Negative { i: usize, j: usize, value: f64 },
    Asymmetric { i: usize, j: usize, forward: f64, backward: f64 },
    /// `d(i, j) > d(i, k) + d(k, j)`.
    Triangle { i: usize, k: usize, j: usize, direct: f64, detour: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Diagonal { i, value } => write!(f, "dist[{i}][{i}] = {value}, expected 0"),
            Violation::Negative { i, j, value } => write!(f, "dist[{i}][{j}] = {value} is negative or non-finite"),
            Violation::Asymmetric { i, j, forward, backward } => {
                write!(f, "dist[{i}][{j}] = {forward} but dist[{j}][{i}] = {backward}")
            }
            Violation::Triangle { i, k, j, direct, detour } => {
                write!(f, "dist[{i}][{j}] = {direct} exceeds dist[{i}][{k}] + dist[{k}][{j}] = {detour}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Which objective an [`Instance`] is solved under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemKind {
    #[serde(rename = "kmedian")]
    KMedian,
    #[serde(rename = "lp")]
    LpNorm,
    #[serde(rename = "ufl")]
    Ufl,
    #[serde(rename = "kufl")]
    Kufl,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::KMedian => "kmedian",
            ProblemKind::LpNorm => "lp",
            ProblemKind::Ufl => "ufl",
            ProblemKind::Kufl => "kufl",
        }
    }

    pub fn needs_k(self) -> bool {
        !matches!(self, ProblemKind::Ufl)
    }

    pub fn needs_opening_costs(self) -> bool {
        matches!(self, ProblemKind::Ufl | ProblemKind::Kufl)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kmedian" | "k-median" => Ok(ProblemKind::KMedian),
            "lp" | "lp_norm" => Ok(ProblemKind::LpNorm),
            "ufl" => Ok(ProblemKind::Ufl),
            "kufl" | "k-ufl" => Ok(ProblemKind::Kufl),
            other => Err(Error::input(format!("unknown problem kind {other:?}"))),
        }
    }
}

/// A metric together with client and candidate-facility roles and the
/// parameters of one problem kind. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    metric: Arc<MetricSpace>,
    clients: Vec<usize>,
    facilities: Vec<usize>,
    k: Option<usize>,
    p: Option<f64>,
    /// Indexed by point; zero for points that are not candidate facilities.
    opening_costs: Option<Vec<f64>>,
    kind: ProblemKind,
    named_sets: BTreeMap<String, Vec<usize>>,
}

impl Instance {
    /// Starts a builder with every point acting as both client and facility.
    pub fn builder(metric: MetricSpace, kind: ProblemKind) -> InstanceBuilder {
        let all: Vec<usize> = (0..metric.len()).collect();
        InstanceBuilder {
            metric: Arc::new(metric),
            clients: all.clone(),
            facilities: all,
            k: None,
            p: None,
            opening_costs: None,
            kind,
            named_sets: BTreeMap::new(),
        }
    }

    /// Builder seeded with this instance's fields, for changing parameters.
    pub fn rebuild(&self) -> InstanceBuilder {
        InstanceBuilder {
            metric: Arc::clone(&self.metric),
            clients: self.clients.clone(),
            facilities: self.facilities.clone(),
            k: self.k,
            p: self.p,
            opening_costs: self.opening_costs.as_ref().map(|c| self.facilities.iter().map(|&f| c[f]).collect()),
            kind: self.kind,
            named_sets: self.named_sets.clone(),
        }
    }

    pub fn metric(&self) -> &MetricSpace {
        &self.metric
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.metric.d(i, j)
    }

    /// Client point indices, ascending.
    pub fn clients(&self) -> &[usize] {
        &self.clients
    }

    /// Candidate facility point indices, ascending.
    pub fn facilities(&self) -> &[usize] {
        &self.facilities
    }

    pub fn is_facility(&self, f: usize) -> bool {
        self.facilities.binary_search(&f).is_ok()
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    pub fn p(&self) -> Option<f64> {
        self.p
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn has_opening_costs(&self) -> bool {
        self.opening_costs.is_some()
    }

    /// Opening cost of facility point `f`; zero when the instance has none.
    #[inline]
    pub fn opening_cost(&self, f: usize) -> f64 {
        self.opening_costs.as_ref().map_or(0.0, |c| c[f])
    }

    /// Named facility subsets carried in the instance file (for example the
    /// even and odd lattice points of a torus instance).
    pub fn named_sets(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.named_sets
    }

    pub fn named_set(&self, name: &str) -> Option<&[usize]> {
        self.named_sets.get(name).map(Vec::as_slice)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            n: self.metric.len(),
            dist: Some(self.metric.to_rows()),
            points: None,
            graph: None,
            clients: Some(self.clients.clone()),
            facilities: Some(self.facilities.clone()),
            k: self.k,
            p: self.p,
            opening_costs: self.opening_costs.as_ref().map(|c| self.facilities.iter().map(|&f| c[f]).collect()),
            problem: self.kind,
            labels: self.metric.labels().map(<[String]>::to_vec),
            named_sets: if self.named_sets.is_empty() { None } else { Some(self.named_sets.clone()) },
        }
    }

    /// Serializes to the instance file format, always materializing `dist`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("instance file serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance file serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(s)?;
        file.into_instance()
    }
}

#[derive(Debug, Clone)]
pub struct InstanceBuilder {
    metric: Arc<MetricSpace>,
    clients: Vec<usize>,
    facilities: Vec<usize>,
    k: Option<usize>,
    p: Option<f64>,
    opening_costs: Option<Vec<f64>>,
    kind: ProblemKind,
    named_sets: BTreeMap<String, Vec<usize>>,
}

impl InstanceBuilder {
    pub fn clients(mut self, clients: Vec<usize>) -> Self {
        self.clients = clients;
        self
    }

    pub fn facilities(mut self, facilities: Vec<usize>) -> Self {
        self.facilities = facilities;
        self
    }

    pub fn k(mut self, k: Option<usize>) -> Self {
        self.k = k;
        self
    }

    pub fn p(mut self, p: Option<f64>) -> Self {
        self.p = p;
        self
    }

    pub fn kind(mut self, kind: ProblemKind) -> Self {
        self.kind = kind;
        self
    }

    /// Opening costs listed in the same order as the facility list.
    pub fn opening_costs(mut self, costs: Option<Vec<f64>>) -> Self {
        self.opening_costs = costs;
        self
    }

    pub fn named_set(mut self, name: impl Into<String>, set: Vec<usize>) -> Self {
        self.named_sets.insert(name.into(), set);
        self
    }

    pub fn build(self) -> Result<Instance> {
        let n = self.metric.len();
        let facilities = sorted_unique("facilities", self.facilities.clone(), n)?;
        let clients = sorted_unique("clients", self.clients, n)?;
        if facilities.is_empty() {
            return Err(Error::input("facility set is empty"));
        }
        let m = facilities.len();
        if self.kind.needs_k() {
            match self.k {
                Some(k) if k >= 1 && k <= m => {}
                Some(k) => return Err(Error::input(format!("k = {k} must lie in 1..={m}"))),
                None => return Err(Error::input(format!("problem {} requires k", self.kind))),
            }
        }
        if let Some(p) = self.p {
            if !p.is_finite() || p < 1.0 {
                return Err(Error::input(format!("p = {p} must be a finite real >= 1")));
            }
        } else if self.kind == ProblemKind::LpNorm {
            return Err(Error::input("problem lp requires p"));
        }
        let opening_costs = match self.opening_costs {
            Some(costs) => {
                if costs.len() != self.facilities.len() {
                    return Err(Error::input(format!(
                        "{} opening costs given for {} facilities",
                        costs.len(),
                        self.facilities.len()
                    )));
                }
                let mut by_point = vec![0.0; n];
                for (&f, &c) in self.facilities.iter().zip(&costs) {
                    if !c.is_finite() || c < 0.0 {
                        return Err(Error::input(format!("opening cost {c} of facility {f} is invalid")));
                    }
                    by_point[f] = c;
                }
                Some(by_point)
            }
            None if self.kind.needs_opening_costs() => {
                return Err(Error::input(format!("problem {} requires opening costs", self.kind)))
            }
            None => None,
        };
        for (name, set) in &self.named_sets {
            if let Some(&f) = set.iter().find(|f| facilities.binary_search(f).is_err()) {
                return Err(Error::input(format!("named set {name:?} contains non-facility {f}")));
            }
        }
        Ok(Instance {
            metric: self.metric,
            clients,
            facilities,
            k: self.k,
            p: self.p,
            opening_costs,
            kind: self.kind,
            named_sets: self.named_sets,
        })
    }
}

fn sorted_unique(what: &str, mut v: Vec<usize>, n: usize) -> Result<Vec<usize>> {
    if let Some(&bad) = v.iter().find(|&&i| i >= n) {
        return Err(Error::input(format!("{what} contain index {bad} outside 0..{n}")));
    }
    v.sort_unstable();
    if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::input(format!("{what} list index {} twice", w[0])));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub edges: Vec<(usize, usize, f64)>,
}

/// On-disk instance document. Exactly one of `dist`, `points`, `graph` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
    /// Defaults to every point when absent.
    #[serde(default)]
    pub clients: Option<Vec<usize>>,
    #[serde(default)]
    pub facilities: Option<Vec<usize>>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub p: Option<f64>,
    /// Parallel to `facilities`.
    #[serde(default)]
    pub opening_costs: Option<Vec<f64>>,
    pub problem: ProblemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub named_sets: Option<BTreeMap<String, Vec<usize>>>,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance> {
        let sources = [self.dist.is_some(), self.points.is_some(), self.graph.is_some()];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(Error::input("exactly one of `dist`, `points`, `graph` must be present"));
        }
        let mut metric = if let Some(rows) = self.dist {
            let metric = MetricSpace::from_matrix(rows)?;
            let report = metric.validate();
            if let Some(v) = report.violations.first() {
                return Err(Error::input(format!(
                    "`dist` is not a metric ({} violations, first: {v})",
                    report.violations.len()
                )));
            }
            metric
        } else if let Some(points) = self.points {
            MetricSpace::from_points(&points)?
        } else {
            let graph = self.graph.expect("one source present");
            MetricSpace::from_graph(self.n, &graph.edges)?
        };
        if metric.len() != self.n {
            return Err(Error::input(format!("n = {} but the metric has {} points", self.n, metric.len())));
        }
        if let Some(labels) = self.labels {
            metric = metric.with_labels(labels)?;
        }
        let n = metric.len();
        let mut builder = Instance::builder(metric, self.problem)
            .clients(self.clients.unwrap_or_else(|| (0..n).collect()))
            .facilities(self.facilities.unwrap_or_else(|| (0..n).collect()))
            .k(self.k)
            .p(self.p)
            .opening_costs(self.opening_costs);
        for (name, set) in self.named_sets.unwrap_or_default() {
            builder = builder.named_set(name, set);
        }
        builder.build()
    }
}
