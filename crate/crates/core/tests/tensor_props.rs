mod common;

use common::{random_tensor, rel_close, rng};
use coreshape::npy::{read_npy, write_npy};
use coreshape::synth::{gaussian_matrix, gaussian_tensor};
use coreshape::tensor::{DenseTensor, Matrix};
use proptest::prelude::*;

fn shape_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..5, 2..=4)
}

#[test]
fn refold_unfold_round_trip_is_exact() {
    let x = random_tensor(&mut rng(1), &[3, 4, 5]);
    for n in 0..3 {
        let u = x.unfold(n).unwrap();
        assert_eq!(DenseTensor::fold(&u.matrix, n, x.shape()).unwrap(), x);
    }
}

#[test]
fn singleton_matricization_is_bit_identical_to_unfolding() {
    let x = random_tensor(&mut rng(2), &[3, 4, 5]);
    for n in 0..3 {
        let a = x.unfold(n).unwrap();
        let b = x.matricize(&[n]).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn mode_product_matches_unfolding_identity() {
    let x = random_tensor(&mut rng(3), &[3, 4, 5]);
    let a = gaussian_matrix(2, 4, 4);
    let y = x.mode_product(1, &a).unwrap();
    let expected = a.matmul(&x.unfold(1).unwrap().matrix).unwrap();
    let folded = DenseTensor::fold(&expected, 1, &[3, 2, 5]).unwrap();
    let diff = y.sub(&folded).unwrap().fro_norm();
    assert!(diff <= 1e-12 * folded.fro_norm());
}

#[test]
fn unfolding_norms_match_tensor_norm() {
    let x = random_tensor(&mut rng(4), &[2, 3, 4, 2]);
    let nx = x.fro_norm();
    for n in 0..4 {
        assert!(rel_close(x.unfold(n).unwrap().matrix.fro_norm(), nx, 1e-12));
    }
}

#[test]
fn npy_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.npy");
    let x = gaussian_tensor(&[4, 5, 6], 99).unwrap();
    write_npy(&x, &path).unwrap();
    let y = read_npy(&path).unwrap();
    assert_eq!(x.shape(), y.shape());
    assert!(x
        .data()
        .iter()
        .zip(y.data())
        .all(|(a, b)| a.to_bits() == b.to_bits()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_every_mode(shape in shape_strategy(), seed in any::<u64>()) {
        let x = random_tensor(&mut rng(seed), &shape);
        for n in 0..shape.len() {
            let u = x.unfold(n).unwrap();
            prop_assert_eq!(&DenseTensor::fold(&u.matrix, n, &shape).unwrap(), &x);
            prop_assert_eq!(&x.matricize(&[n]).unwrap(), &u);
        }
    }

    #[test]
    fn matricization_preserves_norm(shape in shape_strategy(), seed in any::<u64>(), mask in 1u32..15) {
        let x = random_tensor(&mut rng(seed), &shape);
        let n = shape.len();
        let subset: Vec<usize> = (0..n).filter(|m| mask >> m & 1 == 1).collect();
        prop_assume!(!subset.is_empty() && subset.len() < n);
        let u = x.matricize(&subset).unwrap();
        let rows: usize = subset.iter().map(|&m| shape[m]).product();
        prop_assert_eq!(u.matrix.rows(), rows);
        prop_assert!(rel_close(u.matrix.fro_norm(), x.fro_norm(), 1e-12));
        prop_assert!(rel_close(x.fro_norm_sq(), x.inner(&x).unwrap(), 1e-12));
    }

    #[test]
    fn mode_product_commutes_with_unfolding(shape in shape_strategy(), seed in any::<u64>(), j in 1usize..4) {
        let x = random_tensor(&mut rng(seed), &shape);
        for (n, &dim) in shape.iter().enumerate() {
            let a = gaussian_matrix(j, dim, seed ^ n as u64);
            let lhs = x.mode_product(n, &a).unwrap().unfold(n).unwrap().matrix;
            let rhs = a.matmul(&x.unfold(n).unwrap().matrix).unwrap();
            let diff = lhs.add(&rhs.scale(-1.0)).unwrap().fro_norm();
            prop_assert!(diff <= 1e-10 * rhs.fro_norm().max(1e-300));
        }
    }

    #[test]
    fn mode_product_is_linear_in_the_matrix(
        shape in shape_strategy(),
        seed in any::<u64>(),
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
    ) {
        let x = random_tensor(&mut rng(seed), &shape);
        let n = (seed % shape.len() as u64) as usize;
        let a = gaussian_matrix(2, shape[n], seed.wrapping_add(1));
        let b = gaussian_matrix(2, shape[n], seed.wrapping_add(2));
        let combo: Matrix = a.scale(alpha).add(&b.scale(beta)).unwrap();
        let lhs = x.mode_product(n, &combo).unwrap();
        let xa = x.mode_product(n, &a).unwrap();
        let xb = x.mode_product(n, &b).unwrap();
        let rhs = xa.scale(alpha).add(&xb.scale(beta)).unwrap();
        let diff = lhs.sub(&rhs).unwrap().fro_norm();
        let scale = alpha.abs() * xa.fro_norm() + beta.abs() * xb.fro_norm();
        prop_assert!(diff <= 1e-10 * scale.max(1e-300));
    }
}
