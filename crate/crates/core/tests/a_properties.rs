//! Property tests. Named to run before the acceptance target.

use proptest::prelude::*;
use zastava_core::quiver::{
    dimension_bound_batch, interval_stability, interval_stability_brute_force, sample_moment_point, wall_membership,
    ChainsawRep, ChainsawRepJson, Stability, StabilityParam, Variant, WallMode,
};
use zastava_core::yangian::{a_from_big_a, reconstruct_a};
use zastava_core::{Field, Fp, Q, TruncSeries};

fn q() -> impl Strategy<Value = Q> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Q::frac(n, d))
}

fn poly(len: usize) -> impl Strategy<Value = TruncSeries<Q>> {
    (prop::collection::vec(q(), 1..=len), 0i64..2).prop_map(|(c, extra)| {
        let top = c.len() as i64 - 1 + extra;
        TruncSeries::exact(top, c, Q::zero())
    })
}

fn fp_rep(n: usize, d: Vec<usize>) -> impl Strategy<Value = ChainsawRep<Fp<2>>> {
    let size: usize = (0..n).map(|l| d[l] * d[l] + 2 * d[l] + d[l] * d[(l + 1) % n]).sum();
    prop::collection::vec(0u64..2, size).prop_map(move |bits| {
        let mut it = bits.into_iter().map(Fp::<2>);
        let mut rep = ChainsawRep::<Fp<2>>::zero(n, &d, Variant::Cyclic).unwrap();
        for l in 0..n {
            for i in 0..d[l] {
                for j in 0..d[l] {
                    rep.a[l][i][j] = it.next().unwrap();
                }
                rep.p[l][i] = it.next().unwrap();
                rep.q[l][i] = it.next().unwrap();
            }
        }
        for (e, (s, t)) in rep.edges().into_iter().enumerate() {
            for i in 0..d[t] {
                for j in 0..d[s] {
                    rep.b[e][i][j] = it.next().unwrap();
                }
            }
        }
        rep
    })
}

/// Dimension vectors with total at most `max`.
fn small_d(max: usize) -> impl Strategy<Value = Vec<usize>> {
    (1usize..=3).prop_flat_map(move |n| prop::collection::vec(0..=max, n)).prop_filter("total", move |d| d.iter().sum::<usize>() <= max)
}

fn zeta(n: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec((-3i64..=3).prop_map(Q::int), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in q(), b in q(), c in q()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a - &a, Q::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip(), Q::one());
        }
        prop_assert_eq!(a.to_string().parse::<Q>().unwrap(), a);
    }

    #[test]
    fn fp_inverse(x in 1u64..1000) {
        let a = Fp::<1_000_003>(x);
        prop_assert_eq!(Field::mul(&a.pow(1_000_001), &a), Fp::<1_000_003>(1));
        prop_assert_eq!(Field::mul(&a, &Field::inv(&a)), Fp::<1_000_003>(1));
    }

    #[test]
    fn series_mul_associative(f in poly(4), g in poly(4), h in poly(4)) {
        prop_assert_eq!(f.mul(&g).mul(&h).reliable_terms(), f.mul(&g.mul(&h)).reliable_terms());
    }

    #[test]
    fn series_inverse(c in prop::collection::vec(q(), 1..5), lead in 1i64..5) {
        let mut c = c;
        c[0] = Q::int(lead);
        let f = TruncSeries::exact(2, c, Q::zero());
        let prod = f.mul(&f.inv(6).unwrap());
        let terms = prod.reliable_terms();
        prop_assert!(!terms.is_empty());
        for (e, x) in terms {
            prop_assert_eq!(x, if e == 0 { Q::one() } else { Q::zero() });
        }
    }

    #[test]
    fn series_shift_inverts(f in poly(4), c in q()) {
        let back = f.shift(&c).unwrap().shift(&-&c).unwrap();
        for e in 0..=f.top() {
            prop_assert_eq!(back.coeff(e).unwrap(), f.coeff(e).unwrap());
        }
    }

    #[test]
    fn series_json_round_trip(f in poly(5)) {
        let s = serde_json::to_string(&f.to_json()).unwrap();
        let back = TruncSeries::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        prop_assert_eq!(back.reliable_terms(), f.reliable_terms());
    }

    #[test]
    fn reconstruct_round_trip(roots in prop::collection::vec(q(), 1..=3)) {
        // A(u) = prod (u - x_i)
        let mut big = TruncSeries::exact(0, vec![Q::one()], Q::zero());
        for x in &roots {
            big = big.mul(&TruncSeries::exact(1, vec![Q::one(), -x], Q::zero()));
        }
        let d = roots.len();
        let a = a_from_big_a(&big, d + 3).unwrap();
        let back = reconstruct_a(&a, d, d + 1).unwrap();
        for e in 0..=d as i64 {
            prop_assert_eq!(back.coeff(e).unwrap(), big.coeff(e).unwrap());
        }
    }

    #[test]
    fn krylov_matches_exhaustive_search(rep in small_d(3).prop_flat_map(|d| fp_rep(d.len(), d))) {
        prop_assert_eq!(rep.stable_costable(), rep.stable_costable_brute_force().unwrap());
    }

    #[test]
    fn interval_matches_brute_force(z in (1usize..=5).prop_flat_map(zeta), start in 0usize..5, len in 1usize..=5) {
        let n = z.len();
        prop_assume!(start < n && len <= n);
        prop_assert_eq!(interval_stability(&z, start, len).unwrap(), interval_stability_brute_force(&z, start, len).unwrap());
    }

    #[test]
    fn off_walls_no_strict_semistability(z in (1usize..=5).prop_flat_map(zeta)) {
        let n = z.len();
        prop_assume!(wall_membership(&StabilityParam::new(z.clone()), WallMode::Affine).is_empty());
        for start in 0..n {
            for len in 1..=n {
                prop_assert_ne!(interval_stability(&z, start, len).unwrap(), Stability::StrictlySemistable);
            }
        }
    }

    #[test]
    fn dimension_bound_holds(d in prop::collection::vec(0usize..=4, 1..=3)) {
        for b in dimension_bound_batch(&d).unwrap() {
            prop_assert!(b.holds, "{:?}", b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sampled_points_are_regular(d in prop::collection::vec(0usize..=2, 2..=3), seed in 0u64..1000) {
        prop_assume!(d.iter().any(|&x| x > 0));
        let rep = sample_moment_point(d.len(), &d, seed).unwrap();
        prop_assert!(rep.moment_vanishes());
        prop_assert!(rep.moment_cokernel().unwrap().is_empty());
        let s = serde_json::to_string(&rep.to_json()).unwrap();
        let j: ChainsawRepJson = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(ChainsawRep::from_json(&j).unwrap(), rep);
    }

    #[test]
    fn collapse_keeps_moment_zero(d in prop::collection::vec(0usize..=2, 2..=3), seed in 0u64..1000) {
        prop_assume!(d.iter().any(|&x| x > 0));
        let rep = sample_moment_point(d.len(), &d, seed).unwrap();
        let one = rep.collapse_to_single_node().unwrap();
        prop_assert!(one.moment().iter().flatten().all(|x| x.is_zero()));
    }
}
