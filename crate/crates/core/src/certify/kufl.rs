use std::collections::BTreeMap;

use serde::Serialize;

use super::ufl::nearest_first;
use super::{build_eta, build_ufl_pairing, check_ufl_lemmas, Analysis, Certificate, CertificateKind, EtaMap, Record};
use crate::error::{Error, Result};
use crate::metric::{Instance, MetricSpace};
use crate::objective::{facility_cost, Objective, Solution};

/// `(P_f, P*_{f*})`: `facilities[0]` has degree at least 2, the rest are
/// degree-0 facilities; `optimal[0]` is nearest to `facilities[0]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeavyStrip {
    pub facilities: Vec<usize>,
    pub optimal: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KuflPairing {
    /// `(f, f*)` with `η⁻¹(f) = {f*}`.
    pub singles: Vec<(usize, usize)>,
    pub strips: Vec<HeavyStrip>,
    pub excess: Vec<usize>,
    #[serde(skip)]
    pub(super) eta: EtaMap,
}

/// Singles, heavy strips padded with degree-0 facilities in ascending
/// order, and the leftover excess facilities.
pub fn build_kufl_pairing(eta: &EtaMap, metric: &MetricSpace) -> Result<KuflPairing> {
    let mut zeros = eta.local().filter(|&f| eta.degree(f) == 0).collect::<Vec<_>>().into_iter();
    let mut singles = Vec::new();
    let mut strips = Vec::new();
    for f in eta.local() {
        match eta.degree(f) {
            0 => {}
            1 => singles.push((f, eta.preimage(f)[0])),
            d => {
                let mut facilities = vec![f];
                facilities.extend(zeros.by_ref().take(d - 1));
                if facilities.len() != d {
                    return Err(Error::Construction(format!(
                        "not enough degree-0 facilities for the strip at {f} (|F| = {}, |F*| = {})",
                        eta.local_len(),
                        eta.reference_len()
                    )));
                }
                strips.push(HeavyStrip { facilities, optimal: nearest_first(f, eta.preimage(f), metric) });
            }
        }
    }
    Ok(KuflPairing { singles, strips, excess: zeros.collect(), eta: eta.clone() })
}

impl KuflPairing {
    pub fn eta(&self) -> &EtaMap {
        &self.eta
    }

    fn check(&self, metric: &MetricSpace) -> Vec<Record> {
        let mut all: Vec<usize> = self.singles.iter().map(|s| s.0).collect();
        all.extend(self.strips.iter().flat_map(|s| s.facilities.iter().copied()));
        all.extend_from_slice(&self.excess);
        all.sort_unstable();
        let f: Vec<usize> = self.eta.local().collect();
        let sizes = self.strips.iter().filter(|s| s.facilities.len() != s.optimal.len()).count();
        let mut nearest = 0;
        for s in &self.strips {
            let row = metric.row(s.facilities[0]);
            nearest += s.optimal.iter().filter(|&&fs| row[s.optimal[0]] > row[fs]).count();
        }
        vec![
            Record::structural("pairing: singles, strips and excess partition F", usize::from(all != f)),
            Record::structural("pairing: |P_f| = |P*_f*| in every strip", sizes),
            Record::structural("pairing: f*_0 is nearest to f_0 in every strip", nearest),
        ]
    }
}

/// Per-client contribution tallies across every test move.
struct Tally<'a> {
    an: &'a Analysis<'a>,
    by_client: Vec<f64>,
}

impl<'a> Tally<'a> {
    fn gain(&mut self, c: usize) -> f64 {
        let v = self.an.o(c) - self.an.a(c);
        self.by_client[c] += v;
        v
    }

    fn reroute(&mut self, c: usize) -> f64 {
        let v = 2.0 * self.an.o(c);
        self.by_client[c] += v;
        v
    }

    fn to(&mut self, c: usize, f: usize) -> f64 {
        let v = self.an.dist(c, f) - self.an.a(c);
        self.by_client[c] += v;
        v
    }
}

/// Swap and close inequalities over the k-UFL pairing, the per-client
/// `5 O_j − A_j` bounds, and the ratio-5 conclusion. A solution with fewer
/// than `k` open facilities is certified with the UFL lemmas instead.
pub fn check_kufl(inst: &Instance, local: &Solution, reference: &Solution, pairing: Option<&KuflPairing>) -> Result<Certificate> {
    if !inst.has_opening_costs() {
        return Err(Error::input("facility location certificates need opening costs"));
    }
    let k = inst.k().ok_or_else(|| Error::input("k-UFL certificates need k"))?;
    if local.len() > k || reference.len() > k {
        return Err(Error::input(format!("solutions may open at most k = {k} facilities")));
    }
    let fac = |f: usize| inst.opening_cost(f);
    let fac_opt = facility_cost(inst, reference.open());
    let fac_alg = facility_cost(inst, local.open());

    if local.len() < k {
        let eta = build_eta(local.open(), reference.open(), inst.metric());
        let inner = check_ufl_lemmas(inst, local, reference, &build_ufl_pairing(&eta, inst.metric()))?;
        let mut cert = Certificate::new(CertificateKind::Kufl);
        for mut r in inner.records {
            r.label = format!("|F| < k, all moves: {}", r.label);
            cert.push(r);
        }
        let an = Analysis::new(inst, local, reference)?;
        let alg = fac_alg + an.sum_a();
        cert.push(Record::at_local_opt("ratio: kUFL(F) <= 5 kUFL(F*)", alg, 5.0 * (fac_opt + an.sum_o())));
        return Ok(cert);
    }
    let owned;
    let pairing = match pairing {
        Some(p) => p,
        None => {
            owned = build_kufl_pairing(&build_eta(local.open(), reference.open(), inst.metric()), inst.metric())?;
            &owned
        }
    };

    let an = Analysis::new(inst, local, reference)?;
    let obj = Objective::FacilityPlusConnection;
    let mut cert = Certificate::new(CertificateKind::Kufl);
    cert.extend(pairing.check(inst.metric()));
    let mut tally = Tally { an: &an, by_client: vec![0.0; an.n_clients()] };
    let mut bound_sum = 0.0;
    let mut move_record = |cert: &mut Certificate, label: String, remove: &[usize], add: &[usize], bound: f64| {
        let delta = an.exchange_delta(obj, remove, add);
        cert.push(Record::leq(format!("{label}: delta <= bound"), delta, bound));
        cert.push(Record::at_local_opt(format!("{label}: 0 <= delta"), 0.0, delta));
        bound_sum += bound;
    };

    for &(f, fs) in &pairing.singles {
        let mut b = fac(fs) - fac(f);
        for &c in an.served_opt(fs) {
            b += tally.gain(c);
        }
        for &c in an.served(f) {
            if an.phi_star(c) != fs {
                b += tally.reroute(c);
            }
        }
        move_record(&mut cert, format!("single (f={f}, f*={fs})"), &[f], &[fs], b);
    }

    // which strip and position each reference facility of a strip holds
    let mut strip_slot: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (s, strip) in pairing.strips.iter().enumerate() {
        for (i, &fs) in strip.optimal.iter().enumerate() {
            strip_slot.insert(fs, (s, i));
        }
    }
    for (s, strip) in pairing.strips.iter().enumerate() {
        let (f0, fs0) = (strip.facilities[0], strip.optimal[0]);
        let tail = &strip.optimal[1..];
        let mut b = fac(fs0) - fac(f0);
        for &c in an.served_opt(fs0) {
            b += tally.gain(c);
        }
        for &c in an.served(f0) {
            if tail.contains(&an.phi_star(c)) {
                b += tally.to(c, fs0);
            } else {
                b += tally.reroute(c);
            }
        }
        move_record(&mut cert, format!("strip {s} swap (f_0={f0}, f*_0={fs0})"), &[f0], &[fs0], b);

        for i in 1..strip.facilities.len() {
            let (fi, fsi) = (strip.facilities[i], strip.optimal[i]);
            // both variants share the same move; they differ in the bound
            let mut b2 = fac(fsi) - fac(fi);
            for &c in an.served_opt(fsi) {
                let phi = an.phi(c);
                if phi == f0 || phi == fi {
                    b2 += tally.gain(c);
                }
            }
            for &c in an.served(fi) {
                if an.phi_star(c) != fsi {
                    b2 += tally.reroute(c);
                }
            }
            move_record(&mut cert, format!("strip {s} swap (f_{i}={fi}, f*_{i}={fsi}) near variant"), &[fi], &[fsi], b2);
            let mut b3 = fac(fsi) - fac(fi);
            for &c in an.served_opt(fsi) {
                b3 += tally.gain(c);
            }
            for &c in an.served(fi) {
                if an.phi_star(c) != fsi {
                    b3 += tally.reroute(c);
                }
            }
            move_record(&mut cert, format!("strip {s} swap (f_{i}={fi}, f*_{i}={fsi}) full variant"), &[fi], &[fsi], b3);
        }
    }
    for &f in &pairing.excess {
        let mut b = -fac(f);
        for &c in an.served(f) {
            b += tally.reroute(c);
        }
        move_record(&mut cert, format!("excess close f={f}"), &[f], &[], b);
    }

    // per-client case bounds
    let mut five_sum = 0.0;
    for c in 0..an.n_clients() {
        let (o, a) = (an.o(c), an.a(c));
        five_sum += 5.0 * o - a;
        let star = an.phi_star(c);
        let (label, bound) = match strip_slot.get(&star) {
            Some(&(s, i)) if i > 0 => {
                let strip = &pairing.strips[s];
                if an.phi(c) == strip.facilities[0] {
                    ("in N*(f*_i) and N(f_0): contribution <= 3 O_j - A_j", 3.0 * o - a)
                } else if an.phi(c) == strip.facilities[i] {
                    ("in N*(f*_i) and N(f_i): contribution <= 2 (O_j - A_j)", 2.0 * (o - a))
                } else {
                    ("in N*(f*_i) only: contribution <= 5 O_j - A_j", 5.0 * o - a)
                }
            }
            Some(_) => ("in N*(f*_0): contribution <= 5 O_j - A_j", 5.0 * o - a),
            None => ("single: contribution <= 5 O_j - A_j", 5.0 * o - a),
        };
        cert.push(Record::leq(format!("client {} {label}", an.point(c)), tally.by_client[c], bound));
        cert.push(Record::leq(format!("client {}: case bound <= 5 O_j - A_j", an.point(c)), bound, 5.0 * o - a));
    }
    let fac_terms = bound_sum - tally.by_client.iter().sum::<f64>();
    cert.push(Record::leq("facility terms of all bounds <= 2 fac(F*) - fac(F)", fac_terms, 2.0 * fac_opt - fac_alg));
    cert.push(Record::leq("sum of bounds <= 2 fac(F*) - fac(F) + sum (5 O_j - A_j)", bound_sum, 2.0 * fac_opt - fac_alg + five_sum));
    cert.push(Record::at_local_opt("0 <= 2 fac(F*) - fac(F) + sum (5 O_j - A_j)", 0.0, 2.0 * fac_opt - fac_alg + five_sum));
    let alg = fac_alg + an.sum_a();
    let opt_conn = an.sum_o();
    cert.push(Record::at_local_opt("kUFL(F) <= 2 fac(F*) + 5 sum O_j", alg, 2.0 * fac_opt + 5.0 * opt_conn));
    cert.push(Record::at_local_opt("ratio: kUFL(F) <= 5 kUFL(F*)", alg, 5.0 * (fac_opt + opt_conn)));
    Ok(cert)
}
