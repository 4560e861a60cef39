use proptest::prelude::*;
use sdd_core::features::ByKind;
use sdd_core::harness::{generate_synthetic, ShapeKind, SynthSpec};
use sdd_core::matcher::feature_distance;
use sdd_core::spectral::smooth;
use sdd_core::{
    dft_forward, dft_inverse, find_extrema, fit_window_slopes, lowpass, match_features, normalize_features,
    radial_contour, rotate_features, slope_difference, trace_boundary, BinaryMask, ExtremumKind, FeatureSet,
    MatchOptions, ModelRegistry, PipelineParams, Point, RawFeatures, ReferenceModel, SddCurve,
};

fn blob() -> impl Strategy<Value = BinaryMask> {
    (3usize..14, 3usize..14).prop_flat_map(|(w, h)| {
        prop::collection::vec(prop::bool::weighted(0.6), w * h)
            .prop_map(move |data| BinaryMask::new(w, h, data).unwrap())
    })
}

fn signal(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, min..=max)
}

fn total_variation(x: &[f64]) -> f64 {
    (0..x.len()).map(|i| (x[(i + 1) % x.len()] - x[i]).abs()).sum()
}

fn points(max: usize) -> impl Strategy<Value = Vec<Point<f64>>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(x, y)| Point::new(x, y)), 1..=max)
}

fn feature_set(peaks: Vec<Point<f64>>, valleys: Vec<Point<f64>>) -> FeatureSet<f64> {
    FeatureSet {
        magnitudes: ByKind { peaks: vec![0.1; peaks.len()], valleys: vec![0.1; valleys.len()] },
        indices: ByKind { peaks: (0..peaks.len()).collect(), valleys: (0..valleys.len()).collect() },
        peaks,
        valleys,
        params: PipelineParams::default(),
    }
}

proptest! {
    #[test]
    fn traced_boundary_is_closed_8_path(mask in blob()) {
        let Ok(contour) = trace_boundary::<f64>(&mask) else { return Ok(()) };
        let pts: Vec<(usize, usize)> = contour.image_points().collect();
        for (i, &(x, y)) in pts.iter().enumerate() {
            let (nx, ny) = pts[(i + 1) % pts.len()];
            prop_assert!(x.abs_diff(nx) <= 1 && y.abs_diff(ny) <= 1, "gap at {i}");
            let (xi, yi) = (x as isize, y as isize);
            prop_assert!(mask.get(xi, yi));
            let on_edge = [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|&(dx, dy)| !mask.get(xi + dx, yi + dy));
            prop_assert!(on_edge, "interior point {:?}", (x, y));
        }
        // starts at the topmost-leftmost pixel of the component
        let (sx, sy) = pts[0];
        prop_assert!(pts.iter().all(|&(x, y)| (y, x) >= (sy, sx)));
    }

    #[test]
    fn translation_leaves_signature_bit_identical(mask in blob(), dx in 0usize..9, dy in 0usize..9) {
        let Ok(a) = trace_boundary::<f64>(&mask) else { return Ok(()) };
        let b = trace_boundary::<f64>(&mask.translated(dx, dy)).unwrap();
        prop_assert_eq!(&a.points, &b.points);
        if let Ok(ra) = radial_contour(&a, 32) {
            prop_assert_eq!(ra, radial_contour(&b, 32).unwrap());
        }
    }

    #[test]
    fn dft_round_trip(x in signal(8, 512)) {
        let back = dft_inverse(&dft_forward(&x).unwrap()).unwrap();
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn real_input_has_hermitian_spectrum(x in signal(2, 300)) {
        let f = dft_forward(&x).unwrap().coefficients;
        let n = f.len();
        let scale = f.iter().fold(1.0f64, |m, c| m.max(c.norm()));
        for k in 1..n {
            prop_assert!((f[n - k] - f[k].conj()).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn lowpass_energy_is_monotone(x in signal(8, 256), a in 1usize..128, b in 1usize..128) {
        let half = x.len() / 2;
        let (lo, hi) = (a.min(b).min(half), a.max(b).min(half));
        let spectrum = dft_forward(&x).unwrap();
        let e_lo = lowpass(&spectrum, lo).unwrap().energy();
        let e_hi = lowpass(&spectrum, hi).unwrap().energy();
        prop_assert!(e_lo <= e_hi * (1.0 + 1e-12));
        prop_assert!(e_hi <= spectrum.energy() * (1.0 + 1e-12));
        // a symmetric cut always inverts to a real signal
        prop_assert!(dft_inverse(&lowpass(&spectrum, lo).unwrap()).is_ok());
    }

    #[test]
    fn smoothing_reduces_total_variation(x in signal(10, 512), frac in 0.0f64..1.0) {
        let cutoff = 1 + (frac * (x.len() / 5 - 1) as f64) as usize;
        let smoothed = smooth(&x, cutoff).unwrap();
        prop_assert!(total_variation(&smoothed) <= total_variation(&x) + 1e-9);
    }

    #[test]
    fn slopes_match_regression(x in signal(7, 80), j in 0usize..80, n in 3usize..12) {
        prop_assume!(x.len() > 2 * n);
        let j = j % x.len();
        let pair = fit_window_slopes(&x, j, n).unwrap();
        let slope = |first: i64| {
            let xs: Vec<f64> = (first..first + n as i64).map(|i| i as f64).collect();
            let ys: Vec<f64> = (first..first + n as i64).map(|i| x[i.rem_euclid(x.len() as i64) as usize]).collect();
            let (mx, my) = (xs.iter().sum::<f64>() / n as f64, ys.iter().sum::<f64>() / n as f64);
            let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - mx) * (b - my)).sum();
            let sxx: f64 = xs.iter().map(|a| (a - mx) * (a - mx)).sum();
            sxy / sxx
        };
        prop_assert!((pair.a_left - slope(j as i64 - n as i64 + 1)).abs() < 1e-9);
        prop_assert!((pair.a_right - slope(j as i64)).abs() < 1e-9);
    }

    #[test]
    fn negation_flips_sdd_and_kinds(x in signal(9, 120), n in 3usize..8) {
        prop_assume!(x.len() > 2 * n);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let a = slope_difference(&x, n).unwrap();
        let b = slope_difference(&neg, n).unwrap();
        for (p, q) in a.s.iter().zip(&b.s) {
            prop_assert!((p + q).abs() <= 1e-12 * (1.0 + p.abs()));
        }
        let ea = find_extrema(&a, 0.0, 0.0).unwrap();
        let eb = find_extrema(&SddCurve { s: a.s.iter().map(|v| -v).collect(), window: n }, 0.0, 0.0).unwrap();
        prop_assert_eq!(ea.len(), eb.len());
        for (p, q) in ea.iter().zip(&eb) {
            prop_assert_eq!(p.index, q.index);
            prop_assert_ne!(p.kind, q.kind);
        }
    }

    #[test]
    fn circular_shift_is_equivariant(x in signal(9, 120), n in 3usize..8, r in 0usize..120) {
        prop_assume!(x.len() > 2 * n);
        let len = x.len();
        let r = r % len;
        let mut shifted = x.clone();
        shifted.rotate_right(r);
        let a = slope_difference(&x, n).unwrap();
        let b = slope_difference(&shifted, n).unwrap();
        for j in 0..len {
            prop_assert_eq!(a.s[j], b.s[(j + r) % len]);
        }
        let mut ia: Vec<usize> = find_extrema(&a, 0.1, 0.0).unwrap().iter().map(|e| (e.index + r) % len).collect();
        ia.sort_unstable();
        let ib: Vec<usize> = find_extrema(&b, 0.1, 0.0).unwrap().iter().map(|e| e.index).collect();
        prop_assert_eq!(ia, ib);
    }

    #[test]
    fn sdd_has_local_support(x in signal(20, 120), n in 3usize..8, j in 0usize..120, noise in -5.0f64..5.0) {
        let len = x.len();
        prop_assume!(len > 2 * n + 2);
        let j = j % len;
        let mut changed = x.clone();
        for (i, v) in changed.iter_mut().enumerate() {
            let d = (i as i64 - j as i64).rem_euclid(len as i64) as usize;
            if d.min(len - d) > n {
                *v += noise;
            }
        }
        let a = slope_difference(&x, n).unwrap();
        let b = slope_difference(&changed, n).unwrap();
        prop_assert_eq!(a.s[j], b.s[j]);
    }

    #[test]
    fn flat_window_gives_zero_sdd(x in signal(30, 100), c in -5.0f64..5.0, n in 3usize..8, j in 0usize..100) {
        let len = x.len();
        let j = j % len;
        let mut y = x.clone();
        for d in 0..=2 * n {
            y[(j + len + d - n) % len] = c;
        }
        let s = slope_difference(&y, n).unwrap();
        prop_assert!(s.s[j].abs() < 1e-9);
    }

    #[test]
    fn normalized_features_lie_in_unit_disk(
        peaks in points(8),
        valleys in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 0..8),
        cx in -5.0f64..5.0,
        cy in -5.0f64..5.0,
    ) {
        let raw = RawFeatures {
            peaks: peaks.iter().map(|p| Point::new(30.0 * p.x, 30.0 * p.y)).collect(),
            valleys: valleys.iter().map(|&(x, y)| Point::new(x, y)).collect(),
            magnitudes: ByKind { peaks: vec![1.0; peaks.len()], valleys: vec![1.0; valleys.len()] },
            indices: ByKind { peaks: (0..peaks.len()).collect(), valleys: (0..valleys.len()).collect() },
        };
        let Ok(set) = normalize_features(&raw, Point::new(cx, cy), PipelineParams::default()) else { return Ok(()) };
        for list in [&set.peaks, &set.valleys] {
            if list.is_empty() {
                continue;
            }
            let norms: Vec<f64> = list.iter().map(|p| p.norm()).collect();
            prop_assert!(norms.iter().all(|&r| r <= 1.0 + 1e-12));
            prop_assert!((norms.iter().copied().fold(0.0, f64::max) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn star_features_alternate(k in 3usize..=8, rotation in 0.0f64..90.0, outer in 40.0f64..90.0) {
        let spec = SynthSpec::new(ShapeKind::Star { points: k, outer, inner: 0.4 * outer }).rotated(rotation);
        let mask = generate_synthetic(&spec).unwrap();
        let params = PipelineParams { min_mag_ratio: 0.0, min_magnitude: 0.0, ..PipelineParams::default() };
        let a = sdd_core::analyze::<f64>(&mask, &params).unwrap();
        let kinds: Vec<ExtremumKind> = a.extrema.iter().map(|e| e.kind).collect();
        prop_assert!(!kinds.is_empty());
        for i in 0..kinds.len() {
            prop_assert_ne!(kinds[i], kinds[(i + 1) % kinds.len()], "at {}", i);
        }
    }

    #[test]
    fn rotation_preserves_norms(peaks in points(6), theta in -360.0f64..360.0) {
        let set = feature_set(peaks, vec![]);
        let r = rotate_features(&set, theta);
        for (p, q) in set.peaks.iter().zip(&r.peaks) {
            prop_assert!((p.norm() - q.norm()).abs() < 1e-12);
        }
        let back = rotate_features(&r, -theta);
        for (p, q) in set.peaks.iter().zip(&back.peaks) {
            prop_assert!(p.distance(*q) < 1e-12);
        }
    }

    #[test]
    fn equal_count_distance_is_symmetric(a in points(6), b in points(6), va in points(4), vb in points(4)) {
        let n = a.len().min(b.len());
        let m = va.len().min(vb.len());
        let x = feature_set(a[..n].to_vec(), va[..m].to_vec());
        let y = feature_set(b[..n].to_vec(), vb[..m].to_vec());
        let opts = MatchOptions::default();
        let (p1, v1) = feature_distance(&x, &y, &opts).unwrap();
        let (p2, v2) = feature_distance(&y, &x, &opts).unwrap();
        prop_assert!((p1 - p2).abs() < 1e-12 && (v1 - v2).abs() < 1e-12);
    }

    #[test]
    fn finer_theta_grid_never_increases_distance(
        models in prop::collection::vec((points(5), points(5)), 1..4),
        query in (points(5), points(5)),
        step in prop::sample::select(vec![1.0f64, 3.0, 5.0, 9.0, 15.0, 45.0]),
        symmetric in any::<bool>(),
    ) {
        let mut registry = ModelRegistry::multi_exemplar();
        for (i, (p, v)) in models.into_iter().enumerate() {
            registry.push(ReferenceModel { label: format!("m{i}"), source: String::new(), features: feature_set(p, v) }).unwrap();
        }
        let q = feature_set(query.0, query.1);
        let coarse = MatchOptions { theta_step: step, symmetric, ..MatchOptions::default() };
        let fine = MatchOptions { theta_step: step / 2.0, ..coarse };
        let a = match_features(&q, &registry, &coarse).unwrap();
        let b = match_features(&q, &registry, &fine).unwrap();
        for s in &a.ranking {
            let t = b.ranking.iter().find(|t| t.model_index == s.model_index).unwrap();
            prop_assert!(t.distance <= s.distance + 1e-12);
        }
        prop_assert!(b.distance <= a.distance + 1e-12);
        prop_assert_eq!(a.distance, a.ranking.iter().map(|s| s.distance).fold(f64::INFINITY, f64::min));
        prop_assert!(a.theta.abs() <= 45.0);
    }

    #[test]
    fn self_match_is_exact(models in prop::collection::vec((points(5), points(5)), 1..5), pick in 0usize..5) {
        let mut registry = ModelRegistry::multi_exemplar();
        for (i, (p, v)) in models.into_iter().enumerate() {
            registry.push(ReferenceModel { label: format!("m{i}"), source: String::new(), features: feature_set(p, v) }).unwrap();
        }
        let pick = pick % registry.len();
        let q = registry.models()[pick].features.clone();
        let r = match_features(&q, &registry, &MatchOptions::default()).unwrap();
        prop_assert_eq!(r.distance, 0.0);
        prop_assert_eq!(r.theta, 0.0);
        // a different model can only win with an exact tie at a lower index
        prop_assert!(r.model_index <= pick);
    }

    #[test]
    fn registry_order_only_matters_for_ties(
        models in prop::collection::vec((points(5), points(5)), 2..5),
        query in (points(5), points(5)),
        seed in any::<u64>(),
    ) {
        let q = feature_set(query.0, query.1);
        let build = |order: &[usize]| {
            let mut registry = ModelRegistry::new();
            for &i in order {
                let (p, v) = models[i].clone();
                registry.push(ReferenceModel { label: format!("m{i}"), source: String::new(), features: feature_set(p, v) }).unwrap();
            }
            registry
        };
        let forward: Vec<usize> = (0..models.len()).collect();
        let mut shuffled = forward.clone();
        shuffled.rotate_left((seed % models.len() as u64) as usize);
        let a = match_features(&q, &build(&forward), &MatchOptions::default()).unwrap();
        let b = match_features(&q, &build(&shuffled), &MatchOptions::default()).unwrap();
        prop_assert_eq!(a.distance, b.distance);
        let tied = a.ranking.iter().filter(|s| s.distance == a.distance).count();
        if tied == 1 {
            prop_assert_eq!(a.label, b.label);
        }
    }
}

#[test]
fn smoothing_can_raise_total_variation_of_a_step() {
    // Truncated Fourier series overshoot: the bound above does not hold for
    // every signal.
    let mut x = vec![0.0; 8];
    x[0] = 1.0;
    let smoothed = smooth(&x, 3).unwrap();
    assert!((total_variation(&x) - 2.0).abs() < 1e-12);
    assert!((total_variation(&smoothed) - 3.0).abs() < 1e-9);
}
