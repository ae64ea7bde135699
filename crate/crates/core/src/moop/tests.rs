use super::*;
use crate::linalg::{trace_re, CMatrix, CVector};
use crate::metrics::moop_objectives;
use crate::sysmodel::{SepChannels, SystemParams};
use approx::assert_relative_eq;
use num_complex::Complex64;

fn params() -> SystemParams {
    SystemParams::table_2_1()
}

fn channels(seed: u64, trial: u64) -> SepChannels {
    SepChannels::generate(&params(), seed, trial).unwrap()
}

/// Best IR-EE over beams aligned with `h`: a 1024-point grid over the
/// transmit power refined by golden-section search around the best node.
fn aligned_iree_oracle(h_gain: f64, p: &SystemParams) -> f64 {
    let f = |x: f64| (1.0 + x * h_gain / p.noise_w).log2() / (x / p.xi + p.circuit_power());
    let nodes = 1024;
    let step = p.p_max_w / (nodes - 1) as f64;
    let best = (0..nodes).max_by(|&a, &b| f(a as f64 * step).total_cmp(&f(b as f64 * step))).unwrap();
    let mut lo = (best as f64 - 1.0).max(0.0) * step;
    let mut hi = ((best + 1) as f64 * step).min(p.p_max_w);
    for _ in 0..100 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    f(0.5 * (lo + hi)).max(f(best as f64 * step))
}

#[test]
fn power_minimum_is_the_zero_allocation() {
    let ch = channels(1, 0);
    let a = solve_power_min(&ch, &params());
    assert_eq!(a.objectives.p_tx, 0.0);
    assert_eq!(a.w_info.norm(), 0.0);
    assert_eq!(a.objectives, moop_objectives(&ch, &a.w_info, &a.w_energy, &params()));
    assert_relative_eq!(a.theta, 1.0 / 1.6, max_relative = 1e-15);
}

#[test]
fn ehee_closed_form_single_antenna() {
    let mut p = params();
    p.n_tx = 1;
    let ch = SepChannels {
        h: CVector::from_element(1, Complex64::new(0.01, 0.0)),
        g: CVector::from_element(1, Complex64::new(1e-3f64.sqrt(), 0.0)),
        d_info_m: 1.0,
        d_energy_m: 1.0,
    };
    let (_, value) = ehee_closed_form(&ch, &p).unwrap();
    assert_relative_eq!(value, 0.8e-3 / 3.575, max_relative = 1e-12);
    let doubled = SepChannels { g: &ch.g * Complex64::new(2.0, 0.0), ..ch.clone() };
    assert_relative_eq!(ehee_closed_form(&doubled, &p).unwrap().1, 4.0 * value, max_relative = 1e-12);
}

#[test]
fn zero_channels_are_rejected() {
    let p = params();
    let mut ch = channels(1, 0);
    ch.g = CVector::zeros(8);
    assert!(matches!(ehee_closed_form(&ch, &p), Err(crate::SwiptError::Degenerate(_))));
    let mut ch = channels(1, 0);
    ch.h = CVector::zeros(8);
    assert!(solve_iree_max(&ch, &p, &MoopConfig::default()).is_err());
}

#[test]
fn ehee_relaxation_matches_closed_form() {
    let p = params();
    let cfg = MoopConfig::default();
    for trial in 0..10 {
        let ch = channels(11, trial);
        let (_, closed) = ehee_closed_form(&ch, &p).unwrap();
        let sdp = solve_ehee_max_sdp(&ch, &p, &cfg).unwrap();
        assert_relative_eq!(sdp.objectives.eh_ee, closed, max_relative = 1e-4);
        assert!(line_angle(&sdp.w_info, &ch.g) <= 1e-6);
    }
}

#[test]
fn iree_matches_aligned_power_oracle() {
    let p = params();
    let cfg = MoopConfig::default();
    for trial in 0..10 {
        let ch = channels(12, trial);
        let a = solve_iree_max(&ch, &p, &cfg).unwrap();
        let oracle = aligned_iree_oracle(ch.h.norm_squared(), &p);
        assert_relative_eq!(a.objectives.ir_ee, oracle, max_relative = 1e-4);
        assert!(kkt_structure_check(&a.w_info, &ch.h, &ch.g).angle_to_info <= 1e-6);
        assert_eq!(trace_re(&a.w_energy), 0.0);
    }
}

#[test]
fn iree_responds_to_noise_and_circuit_power() {
    let cfg = MoopConfig::default();
    let ch = channels(13, 0);
    let base = solve_iree_max(&ch, &params(), &cfg).unwrap().objectives.ir_ee;
    let mut loud = params();
    loud.noise_w *= 1e12;
    let quiet = solve_iree_max(&ch, &loud, &cfg).unwrap().objectives.ir_ee;
    assert!(quiet < 1e-3 * base);
    let mut hungry = params();
    hungry.p_c_w *= 2.0;
    assert!(solve_iree_max(&ch, &hungry, &cfg).unwrap().objectives.ir_ee < base);
}

#[test]
fn extreme_weights_reproduce_single_objectives() {
    let p = params();
    let cfg = MoopConfig::default();
    for trial in 0..3 {
        let ch = channels(14, trial);
        let anchors = MoopAnchors::compute(&ch, &p, &cfg).unwrap();
        let ir = solve_weighted_minmax(WeightVector::unit(0).unwrap(), &ch, &p, &anchors, &cfg).unwrap();
        assert_relative_eq!(ir.objectives.ir_ee, anchors.ir_ee_star, max_relative = 1e-4);
        let eh = solve_weighted_minmax(WeightVector::unit(1).unwrap(), &ch, &p, &anchors, &cfg).unwrap();
        assert_relative_eq!(eh.objectives.eh_ee, ehee_closed_form(&ch, &p).unwrap().1, max_relative = 1e-4);
        let pw = solve_weighted_minmax(WeightVector::unit(2).unwrap(), &ch, &p, &anchors, &cfg).unwrap();
        assert!(pw.objectives.p_tx <= 1e-6);
    }
}

#[test]
fn mixed_weights_admit_a_rank_one_optimum_without_energy_beam() {
    let p = params();
    let cfg = MoopConfig::default();
    let weights = [(0.5, 0.5, 0.0), (0.3, 0.3, 0.4), (0.1, 0.8, 0.1), (0.8, 0.1, 0.1), (0.0, 0.5, 0.5)];
    for trial in 0..3 {
        let ch = channels(15, trial);
        let anchors = MoopAnchors::compute(&ch, &p, &cfg).unwrap();
        for &(a, b, c) in &weights {
            let w = WeightVector::new(a, b, c).unwrap();
            let alloc = solve_weighted_minmax(w, &ch, &p, &anchors, &cfg).unwrap();
            assert!((-1e-9..=1.0 + 1e-9).contains(&alloc.tau));
            assert!(alloc.rank_ratio <= 1e-6, "combined ratio {}", alloc.rank_ratio);
            if a > 0.0 {
                assert!(alloc.info_rank_ratio() <= 1e-6);
            }
            assert_eq!(alloc.w_energy.norm(), 0.0);
            // the rank-one construction keeps the relaxed optimum
            assert!(alloc.tau <= alloc.relaxed_tau + 1e-6, "{} vs {}", alloc.tau, alloc.relaxed_tau);
            assert!((alloc.relaxed.budget(&p) - 1.0).abs() <= 1e-6);
            assert!(kkt_structure_check(&alloc.w_info, &ch.h, &ch.g).holds(a, b, 1e-6));
            assert!(alloc.objectives.p_tx <= p.p_max_w + 1e-9);
        }
    }
}

#[test]
fn lifted_solution_recovers_the_allocation() {
    let p = params();
    let cfg = MoopConfig::default();
    let ch = channels(16, 0);
    let anchors = MoopAnchors::compute(&ch, &p, &cfg).unwrap();
    let alloc = solve_weighted_minmax(WeightVector::new(0.6, 0.4, 0.0).unwrap(), &ch, &p, &anchors, &cfg).unwrap();
    let lifted = lift(&alloc.w_info, &alloc.w_energy, &p).unwrap();
    assert_relative_eq!(lifted.theta, alloc.theta, max_relative = 1e-12);
    let (w, _) = recover(&lifted).unwrap();
    assert!((w - &alloc.w_info).norm() <= 1e-10 * alloc.w_info.norm().max(1.0));
}

#[test]
fn throughput_baseline_extremes() {
    let p = params();
    let cfg = MoopConfig::default();
    let ch = channels(17, 0);
    let rate = |a: &MoopAllocation| crate::metrics::rate_sep(&ch.h, &a.w_info, p.noise_w);
    let r = solve_throughput_minmax(WeightVector::unit(0).unwrap(), &ch, &p, &cfg).unwrap();
    let rate_star = (1.0 + p.p_max_w * ch.h.norm_squared() / p.noise_w).log2();
    assert!((rate(&r) - rate_star).abs() <= 1e-6 * rate_star);
    let e = solve_throughput_minmax(WeightVector::unit(1).unwrap(), &ch, &p, &cfg).unwrap();
    let harvested = crate::metrics::harvested_sep(&ch.g, &e.w_info, &CMatrix::zeros(8, 8), p.eta);
    assert_relative_eq!(harvested, p.eta * p.p_max_w * ch.g.norm_squared(), max_relative = 1e-6);
    let z = solve_throughput_minmax(WeightVector::unit(2).unwrap(), &ch, &p, &cfg).unwrap();
    assert!(z.objectives.p_tx <= 1e-6);
    let mixed = solve_throughput_minmax(WeightVector::new(0.4, 0.4, 0.2).unwrap(), &ch, &p, &cfg).unwrap();
    assert!((-1e-9..=1.0 + 1e-9).contains(&mixed.tau));
    assert!(mixed.tau <= mixed.relaxed_tau + 1e-6);
}

#[test]
fn weighted_sweep_is_deterministic() {
    let p = params();
    let cfg = MoopConfig::default();
    let ch = channels(18, 0);
    let anchors = MoopAnchors::compute(&ch, &p, &cfg).unwrap();
    let w = WeightVector::new(0.2, 0.5, 0.3).unwrap();
    let a = solve_weighted_minmax(w, &ch, &p, &anchors, &cfg).unwrap();
    let b = solve_weighted_minmax(w, &ch, &p, &anchors, &cfg).unwrap();
    assert_eq!(a, b);
}
