use flmm::config::{Kind, RawConfig};
use flmm::convergence::{eoc_rows, Eoc};
use flmm::output::{fmt_f64, Num};
use proptest::prelude::*;

proptest! {
    #[test]
    fn text_floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let s = fmt_f64(x);
        prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn json_floats_round_trip(xs in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 0..50)) {
        let nums: Vec<Num> = xs.iter().copied().map(Num).collect();
        let text = serde_json::to_string(&nums).unwrap();
        let back: Vec<Num> = serde_json::from_str(&text).unwrap();
        for (a, b) in xs.iter().zip(&back) {
            prop_assert_eq!(a.to_bits(), b.0.to_bits());
        }
    }

    #[test]
    fn eoc_matches_log_ratio(errors in proptest::collection::vec(1e-10f64..1.0, 2..12)) {
        let pairs: Vec<(usize, f64)> = errors.iter().enumerate().map(|(j, e)| (8usize << j, *e)).collect();
        let rows = eoc_rows(&pairs);
        prop_assert_eq!(rows[0].order, Eoc::Absent);
        for w in rows.windows(2) {
            let want = (w[1].max_error / w[0].max_error).ln() / (w[1].h / w[0].h).ln();
            prop_assert!((w[1].order.value().unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn flag_always_beats_file(file_beta in 0.01f64..=1.0, flag_beta in 0.01f64..=1.0) {
        let mut raw = RawConfig::parse(&format!("beta = {file_beta}\nmethod = gl1")).unwrap();
        raw.set("beta", flag_beta.to_string());
        let cfg = raw.resolve(Some(Kind::Weights)).unwrap();
        prop_assert_eq!(cfg.betas[0].value(), flag_beta);
    }
}
