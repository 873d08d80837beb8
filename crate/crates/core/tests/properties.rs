use std::cmp::Ordering;
use std::sync::OnceLock;

use proptest::prelude::*;
use quadsplit::melnikov::{potential_eval, MelnikovModel, PhaseSpec};
use quadsplit::quadfield::{cf_expand, PeriodicCF, QuadSurd};
use quadsplit::resonance::{IntVec2, ResonanceAnalysis};
use quadsplit::splitting::{
    dominant_harmonics, transition_solve, CandidateOptions, CandidateSet, HarmonicEntry, Mode,
    Source,
};

const RADICANDS: [u64; 7] = [2, 3, 5, 6, 7, 13, 17];

fn surd_in(d: u64) -> impl Strategy<Value = QuadSurd> {
    (-50i64..=50, -50i64..=50, 1i64..=30)
        .prop_map(move |(p, q, r)| QuadSurd::new(p, q, r, d).unwrap())
}

fn triple() -> impl Strategy<Value = (QuadSurd, QuadSurd, QuadSurd)> {
    prop::sample::select(RADICANDS.to_vec())
        .prop_flat_map(|d| (surd_in(d), surd_in(d), surd_in(d)))
}

fn analysis_12() -> &'static ResonanceAnalysis {
    static A: OnceLock<ResonanceAnalysis> = OnceLock::new();
    A.get_or_init(|| ResonanceAnalysis::new(&"1,2".parse().unwrap()).unwrap())
}

fn limit_set(threshold: f64, rho: f64) -> CandidateSet {
    CandidateSet::build(
        analysis_12(),
        1e-10,
        1e-3,
        CandidateOptions {
            threshold,
            rho,
            mode: Mode::Limit,
        },
    )
    .unwrap()
}

fn limit_4() -> &'static CandidateSet {
    static S: OnceLock<CandidateSet> = OnceLock::new();
    S.get_or_init(|| limit_set(4.0, 1.0))
}

fn limit_8() -> &'static CandidateSet {
    static S: OnceLock<CandidateSet> = OnceLock::new();
    S.get_or_init(|| limit_set(8.0, 1.0))
}

fn entry() -> impl Strategy<Value = HarmonicEntry> {
    (1i64..40, 1i64..40, 1.0f64..20.0, -30.0f64..0.0).prop_map(|(k1, k2, gt, peak)| {
        HarmonicEntry::from_peak(IntVec2::new(k1, k2), gt, peak, Source::Sporadic)
    })
}

proptest! {
    #[test]
    fn field_axioms((a, b, c) in triple()) {
        let ab_c = a.checked_add(&b).unwrap().checked_add(&c).unwrap();
        let a_bc = a.checked_add(&b.checked_add(&c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        let left = a.checked_mul(&b.checked_add(&c).unwrap()).unwrap();
        let right = a.checked_mul(&b).unwrap().checked_add(&a.checked_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(a.checked_mul(&b).unwrap(), b.checked_mul(&a).unwrap());
        if !a.is_zero() {
            let one = QuadSurd::from_integer(1, a.d()).unwrap();
            prop_assert_eq!(a.checked_mul(&a.checked_recip().unwrap()).unwrap(), one);
        }
        prop_assert!(a.checked_sub(&a).unwrap().is_zero());
    }

    #[test]
    fn compare_agrees_with_floats((a, b, _) in triple()) {
        let (x, y) = (a.to_f64(), b.to_f64());
        let exact = a.compare(&b).unwrap();
        if (x - y).abs() > 1e-9 * (1.0 + x.abs().max(y.abs())) {
            prop_assert_eq!(exact, x.partial_cmp(&y).unwrap());
        }
        prop_assert_eq!(exact == Ordering::Equal, a == b);
        prop_assert_eq!(b.compare(&a).unwrap(), exact.reverse());
    }

    #[test]
    fn periodic_cf_round_trip(period in prop::collection::vec(1u64..25, 1..5)) {
        let cf = PeriodicCF::new(period).unwrap();
        let x = cf.value();
        let exp = cf_expand(&x, 64).unwrap();
        let back = exp.purely_periodic().expect("purely periodic");
        prop_assert_eq!(back.value(), x.clone());
        prop_assert!(back.len() <= cf.len());
        prop_assert!(x.to_f64() > 0.0 && x.to_f64() < 1.0);
    }

    #[test]
    fn g_is_symmetric_with_floor_at_peak(e in entry(), dx in 0.0f64..20.0) {
        let peak = e.ln_eps_peak;
        let floor = e.gamma_tilde.sqrt();
        prop_assert!((e.g_ln(peak) / floor - 1.0).abs() < 1e-14);
        let (lo, hi) = (e.g_ln(peak - dx), e.g_ln(peak + dx));
        prop_assert!((lo / hi - 1.0).abs() < 1e-12);
        prop_assert!(lo >= floor * (1.0 - 1e-14));
    }

    #[test]
    fn transition_root_equalizes(a in entry(), b in entry()) {
        if let Ok(Some(eps)) = transition_solve(&a, &b) {
            let (ga, gb) = (a.g(eps).unwrap(), b.g(eps).unwrap());
            prop_assert!((ga - gb).abs() <= 1e-9 * ga, "{ga} vs {gb}");
        }
    }

    #[test]
    fn h_ordering_and_floor(x in (1e-9f64).ln()..(1e-4f64).ln()) {
        let d = dominant_harmonics(limit_4(), x).unwrap();
        prop_assert!(d.h1 >= 1.0 - 1e-12);
        prop_assert!(d.h1 <= d.h2);
        prop_assert!(d.h2 <= d.h3);
    }

    #[test]
    fn doubling_the_level_keeps_the_dominants(x in (1e-9f64).ln()..(1e-4f64).ln()) {
        let (s4, s8) = (limit_4(), limit_8());
        let d4 = dominant_harmonics(s4, x).unwrap();
        let d8 = dominant_harmonics(s8, x).unwrap();
        prop_assume!(d4.h2 < s4.threshold());
        prop_assert_eq!(d4.h1, d8.h1);
        prop_assert_eq!(d4.h2, d8.h2);
        prop_assert_eq!(&s4.entries[d4.s1].k, &s8.entries[d8.s1].k);
    }

    #[test]
    fn melnikov_phase_shift_translates(c in (0.0f64..6.3, 0.0f64..6.3), t in (0.0f64..6.3, 0.0f64..6.3)) {
        static M: OnceLock<MelnikovModel> = OnceLock::new();
        let m = M.get_or_init(|| {
            MelnikovModel::build(analysis_12(), 1e-2, 1.0, 1.0, PhaseSpec::Seeded(7)).unwrap()
        });
        let shifted = m.shifted([c.0, c.1]);
        let v0 = potential_eval(m, [t.0, t.1]).value;
        let v1 = potential_eval(&shifted, [t.0 + c.0, t.1 + c.1]).value;
        prop_assert!((v0 - v1).abs() < 1e-10 * (1.0 + v0.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// `ρ` only moves the peaks: `h(ε; ρ) = h(ερ²; 1)`.
    #[test]
    fn rho_rescales_eps(rho in 0.5f64..2.0, x in (1e-8f64).ln()..(1e-5f64).ln()) {
        let scaled = limit_set(4.0, rho);
        let d = dominant_harmonics(&scaled, x).unwrap();
        let d1 = dominant_harmonics(limit_4(), x + 2.0 * rho.ln()).unwrap();
        prop_assert!((d.h1 - d1.h1).abs() < 1e-9);
        prop_assert!((d.h2 - d1.h2).abs() < 1e-9);
    }
}
