use super::{Analysis, Certificate, CertificateKind, EtaMap, Record, TSwapPartition, TestPairs};
use crate::error::Result;
use crate::metric::Instance;
use crate::objective::{Objective, Solution};

/// `d(j, η(φ*(j))) <= 2 O_j + A_j` for every client.
pub fn check_projection(inst: &Instance, local: &Solution, reference: &Solution, eta: &EtaMap) -> Result<Certificate> {
    let an = Analysis::new(inst, local, reference)?;
    let mut cert = Certificate::new(CertificateKind::Projection);
    for c in 0..an.n_clients() {
        let lhs = an.dist(c, eta.eta(an.phi_star(c)));
        cert.push(Record::leq(format!("client {}: d(j, eta(phi*(j))) <= 2 O_j + A_j", an.point(c)), lhs, 2.0 * an.o(c) + an.a(c)));
    }
    Ok(cert)
}

/// `Σ_{N*(f*)} (O_j − A_j) + Σ_{N(r)} 2 O_j`, the single-swap upper bound.
fn swap_bound(an: &Analysis<'_>, r: usize, fs: usize) -> f64 {
    let gain: f64 = an.served_opt(fs).iter().map(|&c| an.o(c) - an.a(c)).sum();
    let reroute: f64 = an.served(r).iter().map(|&c| 2.0 * an.o(c)).sum();
    gain + reroute
}

/// Per-pair swap bounds for `S`, their sum, and the ratio-5 conclusion.
pub fn check_kmed_swap_lemma(inst: &Instance, local: &Solution, reference: &Solution, pairs: &TestPairs) -> Result<Certificate> {
    let an = Analysis::new(inst, local, reference)?;
    let mut cert = Certificate::new(CertificateKind::KmedianSwap);
    cert.extend(pairs.check());
    let (mut sum_delta, mut sum_bound) = (0.0, 0.0);
    for &(r, fs) in &pairs.pairs {
        let delta = an.exchange_delta(Objective::KMedian, &[r], &[fs]);
        let bound = swap_bound(&an, r, fs);
        cert.push(Record::leq(format!("swap (r={r}, f*={fs}): delta <= bound"), delta, bound));
        cert.push(Record::at_local_opt(format!("swap (r={r}, f*={fs}): 0 <= delta"), 0.0, delta));
        sum_delta += delta;
        sum_bound += bound;
    }
    let opt = an.sum_o();
    let alg = an.sum_a();
    cert.push(Record::leq("sum of swap bounds <= kmed(F*) - kmed(F) + 4 kmed(F*)", sum_bound, opt - alg + 4.0 * opt));
    cert.push(Record::at_local_opt("0 <= sum of swap deltas", 0.0, sum_delta));
    cert.push(Record::at_local_opt("ratio: kmed(F) <= 5 kmed(F*)", alg, 5.0 * opt));
    Ok(cert)
}

/// Block-swap bounds for blocks of size at most `t`, averaged single-swap
/// bounds over `F*_i × R̂_i` for larger ones, and the `3 + 2/t` conclusion.
pub fn check_tswap_lemmas(inst: &Instance, local: &Solution, reference: &Solution, part: &TSwapPartition, t: usize) -> Result<Certificate> {
    let an = Analysis::new(inst, local, reference)?;
    let mut cert = Certificate::new(CertificateKind::KmedianTswap);
    cert.extend(part.check(&an));
    let tf = t as f64;
    let widen = 2.0 * (1.0 + 1.0 / tf);
    let mut sum_lhs = 0.0;
    let mut sum_bound = 0.0;
    for (i, block) in part.blocks.iter().enumerate() {
        let s = block.size();
        let gain: f64 = block.optimal.iter().flat_map(|&fs| an.served_opt(fs)).map(|&c| an.o(c) - an.a(c)).sum();
        let served_o: f64 = block.facilities.iter().flat_map(|&r| an.served(r)).map(|&c| an.o(c)).sum();
        let lhs = if s <= t {
            let delta = an.exchange_delta(Objective::KMedian, &block.facilities, &block.optimal);
            let bound = gain + 2.0 * served_o;
            cert.push(Record::leq(format!("block {i} (s={s} <= t): block swap delta <= bound"), delta, bound));
            cert.push(Record::at_local_opt(format!("block {i}: 0 <= block swap delta"), 0.0, delta));
            delta
        } else {
            let mut total = 0.0;
            for &fs in &block.optimal {
                for &r in block.padding() {
                    let delta = an.exchange_delta(Objective::KMedian, &[r], &[fs]);
                    cert.push(Record::leq(format!("block {i} swap (r={r}, f*={fs}): delta <= bound"), delta, swap_bound(&an, r, fs)));
                    cert.push(Record::at_local_opt(format!("block {i} swap (r={r}, f*={fs}): 0 <= delta"), 0.0, delta));
                    total += delta;
                }
            }
            let avg = total / (s - 1) as f64;
            cert.push(Record::leq(
                format!("block {i} (s={s} > t): averaged swap delta <= gain + 2(1+1/t) sum O over N(R_i)"),
                avg,
                gain + widen * served_o,
            ));
            avg
        };
        sum_lhs += lhs;
        sum_bound += gain + widen * served_o;
    }
    let opt = an.sum_o();
    let alg = an.sum_a();
    cert.push(Record::leq("sum of block bounds <= kmed(F*) - kmed(F) + 2(1+1/t) kmed(F*)", sum_bound, opt - alg + widen * opt));
    cert.push(Record::at_local_opt("0 <= sum of block deltas", 0.0, sum_lhs));
    cert.push(Record::at_local_opt("ratio: kmed(F) <= (3 + 2/t) kmed(F*)", alg, (3.0 + 2.0 / tf) * opt));
    Ok(cert)
}
