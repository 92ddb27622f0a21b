use proptest::prelude::*;
use viscoshell::mesh::PatchMesh;
use viscoshell::spline::{build_extraction, bspline_on_element, cox_de_boor, nurbs_eval, rational, KnotVector};

// Open knot vector on [0, 1] from random span lengths and interior multiplicities ≤ p.
fn knot_vector() -> impl Strategy<Value = KnotVector> {
    (1usize..=3, prop::collection::vec((0.05f64..1.0, 1usize..=3), 1..=8)).prop_map(|(p, spans)| {
        let total: f64 = spans.iter().map(|s| s.0).sum();
        let mut k = vec![0.0; p + 1];
        let mut x = 0.0;
        for (i, (len, mult)) in spans.iter().enumerate() {
            x += len / total;
            if i + 1 < spans.len() {
                k.extend(std::iter::repeat(x).take((*mult).min(p)));
            }
        }
        k.extend(std::iter::repeat(1.0).take(p + 1));
        KnotVector::new(k, p).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn extraction_matches_cox_de_boor(kv in knot_vector(), s in 0.0f64..=1.0) {
        let p = kv.degree();
        let ops = build_extraction(&kv).unwrap();
        let spans = kv.spans();
        prop_assert_eq!(ops.len(), spans.len());
        for (e, &(i, a, b)) in spans.iter().enumerate() {
            let x = a + s * (b - a);
            let ext = bspline_on_element(&ops[e], p, (a, b), x).unwrap();
            let rec = cox_de_boor(&kv, i, x).unwrap();
            let h = b - a;
            for k in 0..=p {
                prop_assert!((ext.values[k] - rec.values[k]).abs() <= 1e-12);
                prop_assert!((ext.d1[k] - rec.d1[k]).abs() * h <= 1e-12 * (p * p) as f64);
                if p >= 2 {
                    prop_assert!((ext.d2[k] - rec.d2[k]).abs() * h * h <= 1e-11 * (p * p * p) as f64);
                }
            }
        }
    }

    #[test]
    fn univariate_partition_of_unity(kv in knot_vector(), s in 0.0f64..=1.0) {
        let ops = build_extraction(&kv).unwrap();
        for (e, &(_, a, b)) in kv.spans().iter().enumerate() {
            let u = bspline_on_element(&ops[e], kv.degree(), (a, b), a + s * (b - a)).unwrap();
            prop_assert!((u.values.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(u.values.iter().all(|&v| v >= -1e-14));
        }
    }

    #[test]
    fn rational_partition_of_unity(
        p in 1usize..=3, q in 1usize..=3,
        su in 0.0f64..=1.0, sv in 0.0f64..=1.0,
        w in prop::collection::vec(0.2f64..5.0, 16),
    ) {
        let ku = KnotVector::uniform(p, 2).unwrap();
        let kvv = KnotVector::uniform(q, 3).unwrap();
        let (eu, ev) = (build_extraction(&ku).unwrap(), build_extraction(&kvv).unwrap());
        let (a, b) = (0.5, 1.0);
        let (c, d) = (1.0 / 3.0, 2.0 / 3.0);
        let u = bspline_on_element(&eu[1], p, (a, b), a + su * (b - a)).unwrap();
        let v = bspline_on_element(&ev[1], q, (c, d), c + sv * (d - c)).unwrap();
        let n = (p + 1) * (q + 1);
        let r = rational(&u, &v, [p, q], &w[..n]).unwrap();
        prop_assert_eq!(r.len(), n);
        let scale = 1.0 / ((b - a) * (d - c));
        prop_assert!((r.values.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for k in 0..2 {
            prop_assert!(r.d1.iter().map(|g| g[k]).sum::<f64>().abs() <= 1e-12 * scale * 10.0);
        }
        for k in 0..3 {
            prop_assert!(r.d2.iter().map(|g| g[k]).sum::<f64>().abs() <= 1e-11 * scale * scale * 10.0);
        }
    }
}

#[test]
fn mesh_basis_support_and_unity_at_quadrature_points() {
    for degrees in [[1, 1], [2, 2], [2, 3], [3, 3]] {
        let mesh = PatchMesh::flat_rectangle(2.0, 1.0, degrees, [3, 2]).unwrap();
        let (g, _) = viscoshell::element::gauss_legendre(4);
        for e in 0..mesh.elements.len() {
            let el = mesh.element_spline(e);
            assert_eq!(mesh.elements[e].conn.len(), (degrees[0] + 1) * (degrees[1] + 1));
            let ((a, b), (c, d)) = (el.spans[0], el.spans[1]);
            for &gx in &g {
                for &gy in &g {
                    let xi = a + 0.5 * (gx + 1.0) * (b - a);
                    let eta = c + 0.5 * (gy + 1.0) * (d - c);
                    let r = nurbs_eval(&el, xi, eta).unwrap();
                    assert!((r.values.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                    assert!(r.d1.iter().map(|v| v[0]).sum::<f64>().abs() <= 1e-10);
                }
            }
        }
    }
}

#[test]
fn identity_map_is_reproduced() {
    // Greville abscissae as control points reproduce x exactly (linear precision).
    let kv = KnotVector::new(vec![0.0, 0.0, 0.0, 0.2, 0.2, 0.7, 1.0, 1.0, 1.0], 2).unwrap();
    let g = kv.greville();
    let ops = build_extraction(&kv).unwrap();
    for (e, &(i, a, b)) in kv.spans().iter().enumerate() {
        for s in [0.0, 0.3, 0.77, 1.0] {
            let x = a + s * (b - a);
            let u = bspline_on_element(&ops[e], 2, (a, b), x).unwrap();
            let y: f64 = (0..=2).map(|k| u.values[k] * g[i - 2 + k]).sum();
            let dy: f64 = (0..=2).map(|k| u.d1[k] * g[i - 2 + k]).sum();
            assert!((y - x).abs() < 1e-13 && (dy - 1.0).abs() < 1e-12);
        }
    }
}
