use hawkes_longrange::experiments::{ConvergenceTable, TableRow};
use hawkes_longrange::io::table::{parse_convergence, render_convergence};
use hawkes_longrange::io::{render_svg, Metadata, Scale, Series};
use hawkes_longrange::kernel::TemporalKernel;
use hawkes_longrange::lattice::{LatticeKernel, Window};
use hawkes_longrange::meanfield::{exponential_mean_field, solve_volterra, subcritical_limit};
use hawkes_longrange::simulator::{
    simulate_cluster, simulate_cluster_into, CountSink, HawkesConfig,
};
use hawkes_longrange::special::ks_two_sample;
use hawkes_longrange::stable::StableDensity;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn circulant_rows_are_stochastic_and_symmetric(alpha in 0.2f64..1.95, l in 1usize..150) {
        let lat = LatticeKernel::new(alpha, l, Window::Circulant).unwrap();
        let pmf = lat.pmf();
        prop_assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert_eq!(pmf[l], 0.0);
        for d in 1..=l {
            prop_assert_eq!(pmf[l + d], pmf[l - d]);
        }
    }

    #[test]
    fn fft_apply_matches_direct(alpha in 0.3f64..1.9, l in 30usize..90, seed in any::<u64>(), circulant in any::<bool>()) {
        let window = if circulant { Window::Circulant } else { Window::Restricted };
        let lat = LatticeKernel::new(alpha, l, window).unwrap();
        let x: Vec<f64> = (0..lat.sites()).map(|i| ((seed.wrapping_mul(i as u64 + 1) >> 11) as f64) / (1u64 << 53) as f64).collect();
        let fast = lat.apply(&x).unwrap();
        let slow = lat.apply_direct(&x);
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        if !circulant {
            prop_assert!(fast.iter().sum::<f64>() <= x.iter().sum::<f64>() + 1e-12);
        }
    }

    #[test]
    fn exponential_theta_is_a_minus_b(b in 0.2f64..3.0, excess in 0.05f64..4.0) {
        let a = b + excess;
        let k = TemporalKernel::exponential(a, b).unwrap();
        let theta = k.solve_theta().unwrap();
        prop_assert!((theta - excess).abs() < 1e-9 * excess.max(1.0));
        prop_assert!((k.laplace(theta).unwrap() - 1.0).abs() < 1e-10);
        // m̄ = a / (b + θ)² = 1 / a
        prop_assert!((k.m_bar(theta).unwrap() - 1.0 / a).abs() < 1e-8 / a);
    }

    #[test]
    fn cumulative_inverts(a in 0.1f64..3.0, b in 0.1f64..3.0, frac in 0.0f64..0.999) {
        let k = TemporalKernel::exponential(a, b).unwrap();
        let y = frac * k.integral();
        let t = k.inverse_cumulative(y);
        prop_assert!((k.cumulative(t) - y).abs() < 1e-12 * k.integral().max(1.0));
    }

    #[test]
    fn volterra_tracks_closed_form(a in 0.1f64..2.0, b in 0.3f64..2.0, mu in 0.1f64..3.0) {
        let k = TemporalKernel::exponential(a, b).unwrap();
        let lat = LatticeKernel::new(1.5, 2, Window::Circulant).unwrap();
        let sol = solve_volterra(&k, &lat, &[mu; 5], 3.0, 0.005).unwrap();
        for i in (0..sol.grid().len).step_by(50) {
            let t = sol.grid().time(i);
            let (m, x) = exponential_mean_field(a, b, mu, t);
            prop_assert!((sol.x_at(i, 2) / x - 1.0).abs() < 1e-4, "x at {}", t);
            if t > 0.0 {
                prop_assert!((sol.m_at(i, 2) / m - 1.0).abs() < 1e-4, "m at {}", t);
            }
        }
    }

    #[test]
    fn meanfield_monotone_and_above_baseline(a in 0.0f64..2.5, mus in prop::collection::vec(0.0f64..2.0, 9)) {
        let k = if a == 0.0 { TemporalKernel::zero() } else { TemporalKernel::exponential(a, 1.0).unwrap() };
        let lat = LatticeKernel::new(0.8, 4, Window::Restricted).unwrap();
        let sol = solve_volterra(&k, &lat, &mus, 4.0, 0.02).unwrap();
        for i in 1..sol.grid().len {
            for s in 0..9 {
                prop_assert!(sol.m_at(i, s) >= sol.m_at(i - 1, s));
                prop_assert!(sol.x_at(i, s) >= mus[s] * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn constant_baseline_stays_flat(a in 0.1f64..2.5, l in 2usize..40) {
        let k = TemporalKernel::exponential(a, 1.0).unwrap();
        let lat = LatticeKernel::new(1.2, l, Window::Circulant).unwrap();
        let sol = solve_volterra(&k, &lat, &vec![0.7; lat.sites()], 3.0, 0.05).unwrap();
        let last = sol.grid().len - 1;
        let x = sol.x(last);
        for v in &x {
            prop_assert!((v / x[0] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn subcritical_limit_is_linear(i in 0.05f64..0.9, m1 in prop::collection::vec(0.0f64..2.0, 21), m2 in prop::collection::vec(0.0f64..2.0, 21)) {
        let lat = LatticeKernel::new(1.5, 10, Window::Circulant).unwrap();
        let sum: Vec<f64> = m1.iter().zip(&m2).map(|(a, b)| a + b).collect();
        let l1 = subcritical_limit(i, &lat, &m1, 1e-13).unwrap().limit;
        let l2 = subcritical_limit(i, &lat, &m2, 1e-13).unwrap().limit;
        let ls = subcritical_limit(i, &lat, &sum, 1e-13).unwrap().limit;
        for k in 0..21 {
            prop_assert!((ls[k] - l1[k] - l2[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn stable_density_symmetric_and_positive(alpha in 0.4f64..1.95, x in 0.0f64..30.0) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let d = StableDensity::calibrated(alpha).unwrap();
        let (p, q) = (d.pdf(x), d.pdf(-x));
        prop_assert_eq!(p, q);
        prop_assert!(p >= 0.0 && p <= d.density_at_zero() * (1.0 + 1e-9));
        let tail = d.tail_probability(x);
        prop_assert!((0.0..=1.0).contains(&tail));
    }

    #[test]
    fn convergence_csv_round_trips(rows in prop::collection::vec(
        (0.0f64..1e6, -500i64..500, any::<f64>(), any::<f64>(), any::<f64>(), any::<f64>(), 0.0f64..1e3, any::<bool>()), 0..20)) {
        let rows: Vec<TableRow> = rows
            .into_iter()
            .filter(|r| r.2.is_finite() && r.3.is_finite() && r.4.is_finite() && r.5.is_finite())
            .map(|(t, site, mean, estimate, theory, abs_err, mc_stderr, flagged)| TableRow {
                t, site, mean, estimate, theory, abs_err, mc_stderr, flagged,
            })
            .collect();
        let table = ConvergenceTable { rows, notes: vec![("k".into(), "v".into())] };
        let meta = Metadata::new(9, "0123456789abcdef");
        let text = render_convergence(&table, &meta).unwrap();
        let (m, back) = parse_convergence(&text).unwrap();
        prop_assert_eq!(m, meta);
        for (a, b) in back.rows.iter().zip(&table.rows) {
            prop_assert_eq!(a.mean.to_bits(), b.mean.to_bits());
            prop_assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
            prop_assert_eq!(a.theory.to_bits(), b.theory.to_bits());
        }
        prop_assert_eq!(back, table);
    }

    #[test]
    fn svg_has_one_polyline_per_series(ys in prop::collection::vec(prop::collection::vec(0.01f64..1e6, 1..30), 1..6), log in any::<bool>()) {
        let series: Vec<Series> = ys
            .iter()
            .enumerate()
            .map(|(k, v)| Series::new(format!("s{k}"), v.iter().enumerate().map(|(i, y)| (i as f64, *y)).collect()))
            .collect();
        let scale = if log { Scale::LogY } else { Scale::Linear };
        let meta = Metadata::new(0, "h");
        let a = render_svg(&series, scale, "title", &meta).unwrap();
        prop_assert_eq!(a.matches("<polyline").count(), series.len());
        prop_assert_eq!(a, render_svg(&series, scale, "title", &meta).unwrap());
    }

    #[test]
    fn ks_of_identical_samples(v in prop::collection::vec(-1e3f64..1e3, 1..200)) {
        let (d, p) = ks_two_sample(&v, &v);
        prop_assert_eq!(d, 0.0);
        prop_assert!((p - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn streamed_counts_match_event_log(seed in any::<u64>(), replica in 0u64..1000, a in 0.0f64..0.9) {
        let lat = LatticeKernel::new(1.5, 5, Window::Circulant).unwrap();
        let k = if a == 0.0 { TemporalKernel::zero() } else { TemporalKernel::exponential(a, 1.0).unwrap() };
        let cfg = HawkesConfig::new(lat, k, vec![0.8; 11], 15.0, seed).unwrap();
        let log = simulate_cluster(&cfg, replica).unwrap();
        for s in 0..11 {
            let ev = log.site_events(s);
            prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(ev.iter().all(|&t| (0.0..=15.0).contains(&t)));
        }
        let times = [3.0, 7.5, 15.0];
        let sites: Vec<usize> = (0..11).collect();
        let mut sink = CountSink::new(11, &sites, &times);
        let total = simulate_cluster_into(&cfg, replica, &mut sink).unwrap();
        prop_assert_eq!(total, log.total_events());
        let counts = sink.counts();
        for (ti, &t) in times.iter().enumerate() {
            let expected = log.counts_at(t);
            for s in 0..11 {
                prop_assert_eq!(counts[s][ti], expected[s]);
            }
        }
    }
}
