use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Analysis, Certificate, CertificateKind, Record};
use crate::error::{Error, Result};
use crate::metric::MetricSpace;

/// `η: F* → F`, sending each reference facility to its nearest local
/// facility (ties to the smaller index), with the preimage of every `f ∈ F`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EtaMap {
    image: BTreeMap<usize, usize>,
    preimage: BTreeMap<usize, Vec<usize>>,
}

/// Builds `η`. Panics if `local` is empty while `reference` is not.
pub fn build_eta(local: &[usize], reference: &[usize], metric: &MetricSpace) -> EtaMap {
    let mut preimage: BTreeMap<usize, Vec<usize>> = local.iter().map(|&f| (f, Vec::new())).collect();
    let mut image = BTreeMap::new();
    let ordered: BTreeSet<usize> = local.iter().copied().collect();
    for &fs in reference {
        let row = metric.row(fs);
        let mut best: Option<usize> = None;
        for &f in &ordered {
            if best.is_none_or(|b| row[f] < row[b]) {
                best = Some(f);
            }
        }
        let f = best.expect("local facility set is non-empty");
        image.insert(fs, f);
        preimage.get_mut(&f).expect("image lies in F").push(fs);
    }
    for list in preimage.values_mut() {
        list.sort_unstable();
    }
    EtaMap { image, preimage }
}

impl EtaMap {
    pub fn eta(&self, f_star: usize) -> usize {
        self.image[&f_star]
    }

    pub fn get(&self, f_star: usize) -> Option<usize> {
        self.image.get(&f_star).copied()
    }

    /// `deg(f) = |η⁻¹(f)|`.
    pub fn degree(&self, f: usize) -> usize {
        self.preimage.get(&f).map_or(0, Vec::len)
    }

    pub fn preimage(&self, f: usize) -> &[usize] {
        self.preimage.get(&f).map_or(&[], Vec::as_slice)
    }

    /// `F`, ascending.
    pub fn local(&self) -> impl Iterator<Item = usize> + '_ {
        self.preimage.keys().copied()
    }

    /// `F*`, ascending.
    pub fn reference(&self) -> impl Iterator<Item = usize> + '_ {
        self.image.keys().copied()
    }

    pub fn local_len(&self) -> usize {
        self.preimage.len()
    }

    pub fn reference_len(&self) -> usize {
        self.image.len()
    }

    /// Degrees of `F` in ascending facility order.
    pub fn degree_profile(&self) -> Vec<usize> {
        self.preimage.values().map(Vec::len).collect()
    }

    fn zero_degree(&self) -> Vec<usize> {
        self.preimage.iter().filter(|(_, v)| v.is_empty()).map(|(&f, _)| f).collect()
    }

    /// Checks that every image is a nearest local facility and that the
    /// degrees add up to `|F*|`.
    pub fn certificate(&self, metric: &MetricSpace) -> Certificate {
        let mut cert = Certificate::new(CertificateKind::Eta);
        let mut violations = 0;
        for (&fs, &f) in &self.image {
            let row = metric.row(fs);
            violations += self.local().filter(|&g| row[f] > row[g]).count();
        }
        cert.push(Record::structural("eta: d(f*, eta(f*)) <= d(f*, f) for all f in F", violations));
        let total: usize = self.degree_profile().iter().sum();
        cert.push(Record::structural("eta: degrees sum to |F*|", total.abs_diff(self.reference_len())));
        cert
    }
}

/// The single-swap test set `S` over `R = {r ∈ F : deg(r) <= 1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestPairs {
    /// `(r, f*)` pairs.
    pub pairs: Vec<(usize, usize)>,
    /// `R`, ascending.
    pub r_set: Vec<usize>,
    #[serde(skip)]
    pub(super) eta: EtaMap,
}

/// Pairs each degree-1 `r` with its preimage, then hands the remaining
/// reference facilities to degree-0 members of `R` in ascending order, two
/// per facility.
pub fn build_test_pairs(eta: &EtaMap) -> Result<TestPairs> {
    if eta.local_len() != eta.reference_len() {
        return Err(Error::Construction(format!(
            "test pairs need |F| = |F*|, got {} and {}",
            eta.local_len(),
            eta.reference_len()
        )));
    }
    let mut pairs = Vec::new();
    let mut unmatched = Vec::new();
    for f in eta.local() {
        match eta.preimage(f) {
            [single] => pairs.push((f, *single)),
            [] => {}
            many => unmatched.extend_from_slice(many),
        }
    }
    unmatched.sort_unstable();
    let zeros = eta.zero_degree();
    if unmatched.len() > 2 * zeros.len() {
        return Err(Error::Construction(format!(
            "{} unmatched reference facilities but only {} degree-0 facilities",
            unmatched.len(),
            zeros.len()
        )));
    }
    for (i, fs) in unmatched.into_iter().enumerate() {
        pairs.push((zeros[i / 2], fs));
    }
    pairs.sort_unstable();
    let r_set = eta.local().filter(|&f| eta.degree(f) <= 1).collect();
    Ok(TestPairs { pairs, r_set, eta: eta.clone() })
}

impl TestPairs {
    pub fn eta(&self) -> &EtaMap {
        &self.eta
    }

    /// Structural facts about `S`, each as a violation count.
    pub fn check(&self) -> Vec<Record> {
        let eta = &self.eta;
        let mut seen: BTreeMap<usize, usize> = eta.reference().map(|fs| (fs, 0)).collect();
        let mut uses: BTreeMap<usize, usize> = BTreeMap::new();
        for &(r, fs) in &self.pairs {
            *seen.entry(fs).or_insert(0) += 1;
            *uses.entry(r).or_insert(0) += 1;
        }
        let once = seen.values().filter(|&&c| c != 1).count();
        let outside_r = self.pairs.iter().filter(|(r, _)| !self.r_set.contains(r)).count();
        let single_partner = self.pairs.iter().filter(|&&(r, fs)| eta.degree(r) == 1 && eta.preimage(r) != [fs]).count();
        let zero_twice = uses.iter().filter(|&(&r, &c)| eta.degree(r) == 0 && c > 2).count();
        // no other reference facility maps onto a paired r
        let mut fact1 = 0;
        for &(r, fs) in &self.pairs {
            fact1 += eta.reference().filter(|&other| other != fs && eta.eta(other) == r).count();
        }
        vec![
            Record::structural("pairs: every f* appears in exactly one pair", once),
            Record::structural("pairs: every r lies in R", outside_r),
            Record::structural("pairs: degree-1 r pairs only with its preimage", single_partner),
            Record::structural("pairs: degree-0 r used at most twice", zero_twice),
            Record::structural("pairs: no other f* maps to a paired r", fact1),
        ]
    }
}

/// One block `(R_i, F*_i)`; `facilities[0]` is the positive-degree leader
/// when there is one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionBlock {
    pub facilities: Vec<usize>,
    pub optimal: Vec<usize>,
}

impl PartitionBlock {
    pub fn size(&self) -> usize {
        self.facilities.len()
    }

    /// The degree-0 padding `R̂_i`.
    pub fn padding(&self) -> &[usize] {
        &self.facilities[1..]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TSwapPartition {
    pub blocks: Vec<PartitionBlock>,
    #[serde(skip)]
    pub(super) eta: EtaMap,
}

/// Groups each positive-degree facility (ascending) with `deg − 1` unused
/// degree-0 facilities (ascending) against its preimage.
pub fn build_tswap_partition(eta: &EtaMap) -> Result<TSwapPartition> {
    if eta.local_len() != eta.reference_len() {
        return Err(Error::Construction(format!(
            "partition needs |F| = |F*|, got {} and {}",
            eta.local_len(),
            eta.reference_len()
        )));
    }
    let mut zeros = eta.zero_degree().into_iter();
    let mut blocks = Vec::new();
    for r in eta.local().filter(|&f| eta.degree(f) > 0) {
        let mut facilities = vec![r];
        let need = eta.degree(r) - 1;
        facilities.extend(zeros.by_ref().take(need));
        if facilities.len() != need + 1 {
            return Err(Error::Construction(format!("ran out of degree-0 facilities padding {r}")));
        }
        blocks.push(PartitionBlock { facilities, optimal: eta.preimage(r).to_vec() });
    }
    let rest: Vec<usize> = zeros.collect();
    if !rest.is_empty() {
        blocks.push(PartitionBlock { facilities: rest, optimal: Vec::new() });
    }
    Ok(TSwapPartition { blocks, eta: eta.clone() })
}

impl TSwapPartition {
    pub fn eta(&self) -> &EtaMap {
        &self.eta
    }

    /// Partition properties, block shape, and the no-overlap fact over
    /// every client.
    pub(super) fn check(&self, an: &Analysis<'_>) -> Vec<Record> {
        let eta = &self.eta;
        let mut out = Vec::new();
        let mut all_r: Vec<usize> = self.blocks.iter().flat_map(|b| b.facilities.iter().copied()).collect();
        let mut all_o: Vec<usize> = self.blocks.iter().flat_map(|b| b.optimal.iter().copied()).collect();
        all_r.sort_unstable();
        all_o.sort_unstable();
        let f: Vec<usize> = eta.local().collect();
        let fs: Vec<usize> = eta.reference().collect();
        out.push(Record::structural("partition: blocks partition F", usize::from(all_r != f)));
        out.push(Record::structural("partition: blocks partition F*", usize::from(all_o != fs)));
        let sizes = self.blocks.iter().filter(|b| b.facilities.len() != b.optimal.len()).count();
        out.push(Record::structural("partition: |R_i| = |F*_i|", sizes));
        let last = self.blocks.len().saturating_sub(1);
        let mut shape = 0;
        for (i, b) in self.blocks.iter().enumerate() {
            let positive = b.facilities.iter().filter(|&&r| eta.degree(r) > 0).count();
            let ok = if positive == 0 { i == last } else { positive == 1 && eta.degree(b.facilities[0]) > 0 };
            shape += usize::from(!ok);
        }
        out.push(Record::structural("partition: one positive-degree leader per block, rest degree 0", shape));
        let mut block_of_r = BTreeMap::new();
        let mut block_of_o = BTreeMap::new();
        for (i, b) in self.blocks.iter().enumerate() {
            block_of_r.extend(b.facilities.iter().map(|&r| (r, i)));
            block_of_o.extend(b.optimal.iter().map(|&o| (o, i)));
        }
        let mut fact2 = 0;
        for c in 0..an.n_clients() {
            let i = block_of_r[&an.phi(c)];
            let star = an.phi_star(c);
            if block_of_o.get(&star) != Some(&i) && block_of_r.get(&eta.eta(star)) == Some(&i) {
                fact2 += 1;
            }
        }
        out.push(Record::structural("partition: phi(j) in R_i, phi*(j) not in F*_i => eta(phi*(j)) not in R_i", fact2));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> MetricSpace {
        MetricSpace::from_points(&points.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_eta() {
        let m = line(&[0.0, 1.0, 2.0, 3.0]);
        let eta = build_eta(&[0, 2, 3], &[0, 2, 3], &m);
        assert_eq!(eta.degree_profile(), vec![1, 1, 1]);
        for f in [0, 2, 3] {
            assert_eq!(eta.eta(f), f);
        }
        assert!(eta.certificate(&m).verdict);
        let pairs = build_test_pairs(&eta).unwrap();
        assert_eq!(pairs.pairs, vec![(0, 0), (2, 2), (3, 3)]);
        assert!(pairs.check().iter().all(|r| r.pass));
        let part = build_tswap_partition(&eta).unwrap();
        assert!(part.blocks.iter().all(|b| b.facilities.len() == 1 && b.optimal == b.facilities));
    }

    #[test]
    fn all_preimages_on_one_facility() {
        // F = {0, 10, 20}; F* = {1, 2, 3} all nearest to 0
        let pts: Vec<f64> = (0..21).map(f64::from).collect();
        let m = line(&pts);
        let eta = build_eta(&[0, 10, 20], &[1, 2, 3], &m);
        assert_eq!(eta.degree_profile(), vec![3, 0, 0]);
        assert_eq!(eta.preimage(0), &[1, 2, 3]);
    }

    #[test]
    fn ties_go_to_smaller_index() {
        let m = line(&[0.0, 1.0, 2.0]);
        let eta = build_eta(&[2, 0], &[1], &m);
        assert_eq!(eta.eta(1), 0);
    }

    #[test]
    fn degree_two_zero_zero() {
        // F = {0, 10, 20}, F* = {1, 2, 30}: 1,2 -> 0, 30 -> 20
        let pts: Vec<f64> = (0..31).map(f64::from).collect();
        let m = line(&pts);
        let eta = build_eta(&[0, 10, 20], &[1, 2, 30], &m);
        assert_eq!(eta.degree_profile(), vec![2, 0, 1]);
        let s = build_test_pairs(&eta).unwrap();
        assert_eq!(s.pairs, vec![(10, 1), (10, 2), (20, 30)]);
        assert!(!s.pairs.iter().any(|&(r, _)| r == 0));
        assert!(s.check().iter().all(|r| r.pass));
    }

    #[test]
    fn partition_three_zero_zero_one() {
        // F = {0, 10, 20, 30}; F* = {1, 2, 3, 31}
        let pts: Vec<f64> = (0..32).map(f64::from).collect();
        let m = line(&pts);
        let eta = build_eta(&[0, 10, 20, 30], &[1, 2, 3, 31], &m);
        assert_eq!(eta.degree_profile(), vec![3, 0, 0, 1]);
        let part = build_tswap_partition(&eta).unwrap();
        assert_eq!(
            part.blocks,
            vec![
                PartitionBlock { facilities: vec![0, 10, 20], optimal: vec![1, 2, 3] },
                PartitionBlock { facilities: vec![30], optimal: vec![31] },
            ]
        );
        assert_eq!(part.blocks[0].padding(), &[10, 20]);
    }

    #[test]
    fn unequal_sizes_are_refused() {
        let m = line(&[0.0, 1.0, 2.0]);
        let eta = build_eta(&[0], &[1, 2], &m);
        assert!(build_test_pairs(&eta).is_err());
        assert!(build_tswap_partition(&eta).is_err());
    }
}
