use nflp::special::*;
use nflp::RealDf;
use proptest::prelude::*;

fn df(v: f64) -> RealDf<f64> {
    RealDf::new(v).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

// (z, pdf, cdf), 20-digit reference values.
const NORMAL: [(f64, f64, f64); 10] = [
    (-8.0, 5.052271083536892288e-15, 6.2209605742717841235e-16),
    (-5.0, 1.4867195147342977079e-6, 2.8665157187919391167e-7),
    (-2.5, 0.017528300493568537362, 0.006209665325776135167),
    (-1.0, 0.2419707245191433498, 0.15865525393145705141),
    (-0.3, 0.38138781546052408688, 0.38208857781104736693),
    (0.0, 0.39894228040143267794, 0.5),
    (0.7, 0.31225393336676126681, 0.75803634777692697138),
    (1.9709, 0.057202256149299590726, 0.97563234243003196388),
    (3.0, 0.0044318484119380071756, 0.99865010196836990547),
    (6.0, 6.075882849823285487e-9, 0.99999999901341235496),
];

#[test]
fn normal_reference_values() {
    for (z, pdf, cdf) in NORMAL {
        assert!(close(normal_pdf(z), pdf, 1e-13), "pdf({z})");
        assert!(close(normal_cdf(z), cdf, 1e-12), "cdf({z}) = {} vs {cdf}", normal_cdf(z));
        assert!(close(normal_sf(-z), cdf, 1e-12), "sf({})", -z);
    }
}

// (df, t_{0.975}, t_{0.999}, chi2 quantiles at 0.001, 0.025, 0.975, 0.999)
const GRID: [(f64, f64, f64, [f64; 4]); 3] = [
    (
        0.5,
        164.5576734804883,
        102849.11563012391,
        [1.3499395786230753e-12, 5.273202591259991e-07, 3.433235299960771, 8.752888515773373],
    ),
    (
        3.7,
        2.8675207071912086,
        7.795183875029223,
        [0.06541446898331545, 0.39457687534151664, 10.618055248352459, 17.825651694608457],
    ),
    (
        48.0,
        2.010634757624232,
        3.2689100178138837,
        [23.294868559622515, 30.754505709372925, 69.02258578966607, 84.03713371722348],
    ),
];

#[test]
fn quantile_grid() {
    for (d, t975, t999, chi) in GRID {
        assert!(close(t_quantile(0.975, df(d)).unwrap(), t975, 1e-9), "t 0.975 df {d}");
        assert!(close(t_quantile(0.999, df(d)).unwrap(), t999, 1e-9), "t 0.999 df {d}");
        assert!(close(t_quantile(0.025, df(d)).unwrap(), -t975, 1e-9), "t 0.025 df {d}");
        for (p, q) in [0.001, 0.025, 0.975, 0.999].into_iter().zip(chi) {
            let got = chisq_quantile(p, df(d)).unwrap();
            assert!(close(got, q, 1e-9), "chi2 {p} df {d}: {got} vs {q}");
        }
    }
}

#[test]
fn fractional_df_reference_values() {
    let d = df(9.1052);
    assert!(close(t_quantile(0.975, d).unwrap(), 2.2581792788646555, 1e-10));
    assert!(close(t_quantile(0.999, d).unwrap(), 4.278670667776057, 1e-10));
    assert!(close(chisq_quantile(0.975, d).unwrap(), 19.177627753860268, 1e-10));
    assert!(close(chisq_quantile(0.025, d).unwrap(), 2.756742560277502, 1e-10));
    assert!(close(chisq_quantile(0.001, d).unwrap(), 1.184892638167971, 1e-10));
    assert!(close(chisq_quantile(0.999, d).unwrap(), 28.059008920527113, 1e-10));
    assert!(close(t_quantile(0.975, df(10.0)).unwrap(), 2.2281388519649385, 1e-10));
    assert!(close(t_two_sided_p(4.7310, df(17.8895)), 0.00016937988743616692, 1e-9));
    assert!(close(t_two_sided_p(-0.4549, df(16.0447)), 0.6552758441051445, 1e-10));
}

#[test]
fn gamma_beta_f_reference_values() {
    assert!(close(ln_gamma(0.3), 1.0957979948180755606, 1e-13));
    assert!(close(ln_gamma(7.25), 7.0521854507385394449, 1e-13));
    assert!(close(gamma_p(2.5, 1.3), 0.23863473215498609683, 1e-12));
    assert!(close(beta_inc(2.5, 4.1, 0.3), 0.36318251042196874608, 1e-12));
    assert!(close(f_cdf(2.5, df(3.0), df(7.5)), 0.8618063972355371, 1e-11));
    assert!(close(f_sf(2.5, df(3.0), df(7.5)), 0.13819360276446288, 1e-11));
}

#[test]
fn rejects_bad_arguments() {
    assert!(RealDf::new(0.0).is_err());
    assert!(RealDf::new(f64::NAN).is_err());
    assert!(RealDf::new(f64::INFINITY).is_err());
    for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
        assert!(t_quantile(p, df(3.0)).is_err());
        assert!(chisq_quantile(p, df(3.0)).is_err());
        assert!(normal_quantile(p).is_err());
    }
}

#[test]
fn single_precision_path() {
    let d = RealDf::new(9.1052f32).unwrap();
    assert!((t_quantile(0.975f32, d).unwrap() - 2.258_179).abs() < 1e-4);
    assert!((chisq_quantile(0.975f32, d).unwrap() - 19.177_628).abs() < 1e-3);
    assert!((normal_cdf(1.0f32) - 0.841_344_7).abs() < 1e-6);
}

proptest! {
    #[test]
    fn t_quantile_inverts_cdf(p in 1e-6f64..0.999_999, d in 0.3f64..200.0) {
        let q = t_quantile(p, df(d)).unwrap();
        prop_assert!((t_cdf(q, df(d)) - p).abs() <= 1e-9 * p.min(1.0 - p).max(1e-3));
    }

    #[test]
    fn chisq_quantile_inverts_cdf(p in 1e-6f64..0.999_999, d in 0.3f64..200.0) {
        let q = chisq_quantile(p, df(d)).unwrap();
        prop_assert!((chisq_cdf(q, df(d)) - p).abs() <= 1e-9 * p.min(1.0 - p).max(1e-3));
    }

    #[test]
    fn normal_quantile_inverts_cdf(p in 1e-12f64..(1.0 - 1e-12)) {
        let z = normal_quantile(p).unwrap();
        prop_assert!((normal_cdf(z) - p).abs() <= 1e-12 * p.min(1.0 - p).max(1e-4));
    }

    #[test]
    fn t_cdf_is_symmetric_and_monotone(x in -50f64..50.0, dx in 1e-3f64..5.0, d in 0.3f64..100.0) {
        prop_assert!((t_cdf(x, df(d)) + t_cdf(-x, df(d)) - 1.0).abs() < 1e-13);
        prop_assert!(t_cdf(x + dx, df(d)) >= t_cdf(x, df(d)));
    }

    #[test]
    fn chisq_cdf_is_monotone(x in 0f64..200.0, dx in 1e-3f64..10.0, d in 0.3f64..100.0) {
        prop_assert!(chisq_cdf(x + dx, df(d)) >= chisq_cdf(x, df(d)));
        prop_assert!((chisq_cdf(x, df(d)) + chisq_sf(x, df(d)) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn t_squared_is_f(t in -30f64..30.0, d in 0.5f64..80.0) {
        let from_t = t_two_sided_p(t, df(d));
        let from_f = f_sf(t * t, df(1.0), df(d));
        prop_assert!((from_t - from_f).abs() <= 1e-11 * from_t.max(1e-12) + 1e-15);
    }
}
