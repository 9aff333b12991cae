use serde::Serialize;

use super::{Analysis, Certificate, CertificateKind, EtaMap, Record};
use crate::error::{Error, Result};
use crate::metric::{Instance, MetricSpace};
use crate::objective::{facility_cost, Objective, Solution};

/// A facility with non-empty preimage; `preimage[0]` is `f*_0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BadFacility {
    pub facility: usize,
    pub preimage: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UflPairing {
    pub good: Vec<usize>,
    pub bad: Vec<BadFacility>,
    #[serde(skip)]
    pub(super) eta: EtaMap,
}

/// Orders `preimage` with the member nearest to `f` first (ties to the
/// smaller index) and the rest ascending.
pub(super) fn nearest_first(f: usize, preimage: &[usize], metric: &MetricSpace) -> Vec<usize> {
    let row = metric.row(f);
    let mut out = preimage.to_vec();
    out.sort_unstable();
    let lead = (0..out.len()).min_by(|&a, &b| row[out[a]].total_cmp(&row[out[b]]).then(a.cmp(&b))).expect("non-empty preimage");
    let first = out.remove(lead);
    out.insert(0, first);
    out
}

pub fn build_ufl_pairing(eta: &EtaMap, metric: &MetricSpace) -> UflPairing {
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for f in eta.local() {
        if eta.degree(f) == 0 {
            good.push(f);
        } else {
            bad.push(BadFacility { facility: f, preimage: nearest_first(f, eta.preimage(f), metric) });
        }
    }
    UflPairing { good, bad, eta: eta.clone() }
}

impl UflPairing {
    pub fn eta(&self) -> &EtaMap {
        &self.eta
    }

    pub(super) fn check(&self, metric: &MetricSpace) -> Vec<Record> {
        let mut all: Vec<usize> = self.good.iter().copied().chain(self.bad.iter().map(|b| b.facility)).collect();
        all.sort_unstable();
        let f: Vec<usize> = self.eta.local().collect();
        let mut nearest = 0;
        for b in &self.bad {
            let row = metric.row(b.facility);
            nearest += b.preimage.iter().filter(|&&fs| row[b.preimage[0]] > row[fs]).count();
        }
        vec![
            Record::structural("pairing: good and bad facilities partition F", usize::from(all != f)),
            Record::structural("pairing: f*_0 is nearest to f among P*_f", nearest),
        ]
    }
}

fn require_costs(inst: &Instance) -> Result<()> {
    if inst.has_opening_costs() {
        Ok(())
    } else {
        Err(Error::input("facility location certificates need opening costs"))
    }
}

/// Open-move, close-move and swap-move inequalities for UFL, the
/// connection and facility cost lemmas, and the ratio-3 conclusion.
pub fn check_ufl_lemmas(inst: &Instance, local: &Solution, reference: &Solution, pairing: &UflPairing) -> Result<Certificate> {
    require_costs(inst)?;
    let an = Analysis::new(inst, local, reference)?;
    let obj = Objective::FacilityPlusConnection;
    let fac = |f: usize| inst.opening_cost(f);
    let eta = &pairing.eta;
    let mut cert = Certificate::new(CertificateKind::Ufl);
    cert.extend(pairing.check(inst.metric()));

    // connection cost: open each f* in turn
    let mut open_sum = 0.0;
    for fs in eta.reference() {
        let delta = an.exchange_delta(obj, &[], &[fs]);
        let bound = fac(fs) + an.served_opt(fs).iter().map(|&c| an.o(c) - an.a(c)).sum::<f64>();
        cert.push(Record::leq(format!("open f*={fs}: delta <= fac(f*) + sum (O_j - A_j)"), delta, bound));
        cert.push(Record::at_local_opt(format!("open f*={fs}: 0 <= delta"), 0.0, delta));
        open_sum += bound;
    }
    let fac_opt = facility_cost(inst, reference.open());
    let fac_alg = facility_cost(inst, local.open());
    let (opt_conn, alg_conn) = (an.sum_o(), an.sum_a());
    cert.push(Record::at_local_opt("0 <= sum of open-move bounds", 0.0, open_sum));
    cert.push(Record::at_local_opt("connection: sum A_j <= fac(F*) + sum O_j", alg_conn, fac_opt + opt_conn));

    let two_o = |cs: &[usize]| -> f64 { cs.iter().map(|&c| 2.0 * an.o(c)).sum() };
    let mut facility_sum = 0.0;
    for &f in &pairing.good {
        let bound = -fac(f) + two_o(an.served(f));
        if local.len() > 1 {
            let delta = an.exchange_delta(obj, &[f], &[]);
            cert.push(Record::leq(format!("close good f={f}: delta <= -fac(f) + sum 2 O_j"), delta, bound));
            cert.push(Record::at_local_opt(format!("close good f={f}: 0 <= delta"), 0.0, delta));
        }
        cert.push(Record::at_local_opt(format!("good f={f}: 0 <= -fac(f) + sum 2 O_j"), 0.0, bound));
        facility_sum += bound;
    }
    for b in &pairing.bad {
        let f = b.facility;
        let f0 = b.preimage[0];
        let served = an.served(f);
        let mut combined_bound = 0.0;
        let mut combined_clients = 0.0;
        // open f*_i, i >= 1, moving its clients in N(f)
        for &fi in &b.preimage[1..] {
            let terms: f64 = served.iter().filter(|&&c| an.phi_star(c) == fi).map(|&c| an.o(c) - an.a(c)).sum();
            let delta = an.exchange_delta(obj, &[], &[fi]);
            let bound = fac(fi) + terms;
            cert.push(Record::leq(format!("bad f={f}, open f*_i={fi}: delta <= bound"), delta, bound));
            cert.push(Record::at_local_opt(format!("bad f={f}, open f*_i={fi}: 0 <= delta"), 0.0, delta));
            combined_bound += bound;
            combined_clients += terms;
        }
        // open f*_0 and close f
        let mut outside = 0.0;
        let mut inside = 0.0;
        for &c in served {
            if b.preimage.contains(&an.phi_star(c)) {
                inside += an.dist(c, f0) - an.a(c);
            } else {
                outside += 2.0 * an.o(c);
            }
        }
        let bound = fac(f0) - fac(f) + outside + inside;
        let delta = an.exchange_delta(obj, &[f], &[f0]);
        cert.push(Record::leq(format!("bad f={f}, swap in f*_0={f0}: delta <= bound"), delta, bound));
        cert.push(Record::at_local_opt(format!("bad f={f}, swap in f*_0={f0}: 0 <= delta"), 0.0, delta));
        combined_bound += bound;
        combined_clients += outside + inside;
        let fac_p: f64 = b.preimage.iter().map(|&fs| fac(fs)).sum();
        let simplified = fac_p - fac(f) + two_o(served);
        cert.push(Record::leq(format!("bad f={f}: combined client terms <= sum over N(f) of 2 O_j"), combined_clients, two_o(served)));
        cert.push(Record::leq(format!("bad f={f}: combined bound <= fac(P*_f) - fac(f) + sum 2 O_j"), combined_bound, simplified));
        cert.push(Record::at_local_opt(format!("bad f={f}: 0 <= fac(P*_f) - fac(f) + sum 2 O_j"), 0.0, simplified));
        facility_sum += simplified;
    }
    cert.push(Record::leq("sum of facility bounds <= fac(F*) - fac(F) + 2 sum O_j", facility_sum, fac_opt - fac_alg + 2.0 * opt_conn));
    cert.push(Record::at_local_opt("facility: fac(F) <= fac(F*) + 2 sum O_j", fac_alg, fac_opt + 2.0 * opt_conn));
    let alg = fac_alg + alg_conn;
    cert.push(Record::at_local_opt("UFL(F) <= 2 fac(F*) + 3 sum O_j", alg, 2.0 * fac_opt + 3.0 * opt_conn));
    cert.push(Record::at_local_opt("ratio: UFL(F) <= 3 UFL(F*)", alg, 3.0 * (fac_opt + opt_conn)));
    Ok(cert)
}
