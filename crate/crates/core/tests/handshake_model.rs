use kemscope::handshake::{
    analyze_trace, handshake_payload, parse_trace, simulate_handshake_rate, synthetic_trace, table2_report,
    write_trace, AuthConfig, Calibration, KexFamily, KexGroup, NetProfile, TraceRecord, TABLE2,
};
use proptest::prelude::*;

const KEM_GROUPS: [KexGroup; 4] = [
    KexGroup::MlKem512,
    KexGroup::MlKem768,
    KexGroup::MlKem1024,
    KexGroup::X25519MlKem768,
];

#[test]
fn shipped_calibration_reproduces_every_total() {
    let rows = table2_report(&Calibration::table2()).unwrap();
    let totals: Vec<u64> = rows.iter().map(|r| r.total_bytes).collect();
    assert_eq!(totals, [1893, 7257, 4157, 9521, 3389, 8753, 4093, 9457, 4957, 10321]);
}

#[test]
fn structural_deltas_hold_for_any_calibration() {
    for (kem, classical) in [(0.0, 0.0), (1000.0, 1200.0), (1821.0, 1829.0)] {
        let cal = Calibration::from_rsa_bases(kem, classical);
        let t = |g, a| handshake_payload(g, a, &cal).unwrap().total_bytes as i64;
        use AuthConfig::*;
        use KexGroup::*;
        assert_eq!(t(MlKem768, Rsa) - t(MlKem512, Rsa), 704);
        assert_eq!(t(MlKem1024, Rsa) - t(MlKem768, Rsa), 864);
        assert_eq!(t(X25519MlKem768, Rsa) - t(MlKem768, Rsa), 64);
        for g in KexGroup::ALL {
            assert_eq!(t(g, MlDsa44) - t(g, Rsa), 5364);
        }
        for a in KEM_GROUPS {
            for b in KEM_GROUPS {
                assert_eq!(t(a, Rsa) - t(b, Rsa), a.kex_bytes() as i64 - b.kex_bytes() as i64);
            }
        }
    }
}

#[test]
fn kem_family_bases_agree() {
    let cal = Calibration::table2();
    let cell = cal
        .cells
        .iter()
        .find(|c| c.family == KexFamily::KemBearing && c.auth == AuthConfig::Rsa)
        .unwrap();
    assert_eq!((cell.base_bytes, cell.observations, cell.spread), (1821.0, 4, 0.0));
}

#[test]
fn synthetic_traces_round_trip() {
    let cal = Calibration::table2();
    for o in TABLE2 {
        let trace = synthetic_trace(o.kex, o.auth, &cal).unwrap();
        let parsed = parse_trace(&write_trace(&trace)).unwrap();
        assert_eq!(analyze_trace(&parsed).total_bytes, o.total_bytes);
    }
}

proptest! {
    #[test]
    fn trace_sum_is_permutation_invariant_and_linear(
        a in prop::collection::vec((any::<bool>(), 0u64..5000), 0..40),
        b in prop::collection::vec((any::<bool>(), 0u64..5000), 0..40),
    ) {
        let to = |v: &[(bool, u64)]| -> Vec<TraceRecord> {
            v.iter().map(|&(c, n)| if c { TraceRecord::c2s(n) } else { TraceRecord::s2c(n) }).collect()
        };
        let (ta, tb) = (to(&a), to(&b));
        let mut rev = ta.clone();
        rev.reverse();
        prop_assert_eq!(analyze_trace(&ta), analyze_trace(&rev));
        let joined: Vec<_> = ta.iter().chain(&tb).copied().collect();
        prop_assert_eq!(analyze_trace(&joined), analyze_trace(&ta).merge(analyze_trace(&tb)));
    }

    #[test]
    fn rate_monotone(d1 in 0.0f64..0.3, d2 in 0.0f64..0.3, l in 0.0f64..0.05, c in 0.0001f64..0.05) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let a = simulate_handshake_rate(&NetProfile::with_delay(lo).with_loss(l), c, 11.0).unwrap();
        let b = simulate_handshake_rate(&NetProfile::with_delay(hi).with_loss(l), c, 11.0).unwrap();
        prop_assert!(a.completed >= b.completed);
    }
}
