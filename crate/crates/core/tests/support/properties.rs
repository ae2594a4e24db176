//! Property checks shared by the property tests and the acceptance run.
//! Each returns `Err` with the failing input on the first counterexample.

use halfint_core::arith::DirichletCharacter;
use halfint_core::coeffile::CoefficientFile;
use halfint_core::hecke::twisted_component;
use halfint_core::qseries::{euler, Offset};
use halfint_core::{HalfIntegralForm, IntegerSeries};
use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub type Check = fn(u32) -> Result<(), String>;

pub const ALL: [(&str, Check); 7] = [
    ("ring axioms", ring_axioms),
    ("euler vs product", euler_vs_product),
    ("sparse vs schoolbook", sparse_vs_schoolbook),
    ("leibniz", leibniz),
    ("U after dilate", u_after_dilate),
    ("twist partition", twist_partition),
    ("coefficient file round trip", coeffile_round_trip),
];

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn series(offset: i64, coeffs: &[i64]) -> IntegerSeries {
    IntegerSeries::from_dense(
        Offset::integer(offset),
        coeffs.iter().map(|&c| BigInt::from(c)).collect(),
    )
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..50, len)
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

pub fn ring_axioms(cases: u32) -> Result<(), String> {
    run(
        cases,
        (
            0i64..3,
            coeffs(64),
            0i64..3,
            coeffs(64),
            0i64..3,
            coeffs(64),
        ),
        |(oa, a, ob, b, oc, c)| {
            let (a, b, c) = (series(oa, &a), series(ob, &b), series(oc, &c));
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(
                a.add(&b).unwrap().add(&c).unwrap(),
                a.add(&b.add(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            let lhs = a.mul(&b.add(&c).unwrap());
            let rhs = a.mul(&b).add(&a.mul(&c)).unwrap();
            let end = lhs.end().min(rhs.end());
            prop_assert_eq!(lhs.truncate_abs(end), rhs.truncate_abs(end));
            prop_assert_eq!(a.mul(&IntegerSeries::one(64)), a.clone());
            let zero = a.sub(&a).unwrap();
            prop_assert_eq!(zero.nnz(), 0);
            prop_assert_eq!(a.add(&zero).unwrap(), a);
            Ok(())
        },
    )
}

pub fn euler_vs_product(cases: u32) -> Result<(), String> {
    run(cases, 1usize..=256, |prec| {
        let mut acc = IntegerSeries::one(prec);
        for n in 1..prec {
            let factor = IntegerSeries::from_sparse(
                Offset::ZERO,
                prec,
                vec![(0, BigInt::from(1)), (n, BigInt::from(-1))],
            )
            .unwrap();
            acc = acc.mul(&factor);
        }
        prop_assert_eq!(euler::<BigInt>(prec).to_dense_vec(), acc.to_dense_vec());
        Ok(())
    })
}

pub fn sparse_vs_schoolbook(cases: u32) -> Result<(), String> {
    let strategy = (1usize..=512).prop_flat_map(|prec| {
        (
            coeffs(prec),
            prop::collection::btree_map(
                0..prec,
                (-9i64..10).prop_filter("nonzero", |c| *c != 0),
                0..=prec / 16,
            ),
        )
    });
    run(cases, strategy, |(dense, sparse)| {
        let prec = dense.len();
        let a = series(0, &dense);
        let b = IntegerSeries::from_sparse(
            Offset::ZERO,
            prec,
            sparse
                .into_iter()
                .map(|(i, c)| (i, BigInt::from(c)))
                .collect(),
        )
        .unwrap();
        prop_assert_eq!(a.mul(&b), a.mul_schoolbook(&b));
        prop_assert_eq!(b.mul(&a), a.mul_schoolbook(&b));
        Ok(())
    })
}

pub fn leibniz(cases: u32) -> Result<(), String> {
    run(
        cases,
        (0i64..4, coeffs(48), 0i64..4, coeffs(48)),
        |(oa, a, ob, b)| {
            let (a, b) = (series(oa, &a), series(ob, &b));
            let lhs = a.mul(&b).derive().unwrap();
            let rhs = a
                .derive()
                .unwrap()
                .mul(&b)
                .add(&a.mul(&b.derive().unwrap()))
                .unwrap();
            prop_assert_eq!(lhs, rhs);
            Ok(())
        },
    )
}

pub fn u_after_dilate(cases: u32) -> Result<(), String> {
    run(cases, (0i64..5, coeffs(40), 1u64..8), |(o, a, m)| {
        let a = series(o, &a);
        prop_assert_eq!(a.dilate(m).unwrap().u_op(m).unwrap(), a);
        Ok(())
    })
}

pub fn twist_partition(cases: u32) -> Result<(), String> {
    run(
        cases,
        (coeffs(120), prop::sample::select(vec![3u64, 5, 7, 11, 13])),
        |(c, p)| {
            let c: Vec<BigInt> = c.into_iter().map(BigInt::from).collect();
            let f = HalfIntegralForm::new(13, 4, DirichletCharacter::trivial(4), c.clone(), false)
                .unwrap();
            let parts: Vec<HalfIntegralForm> = [1, -1, 0]
                .iter()
                .map(|&e| twisted_component(&f, p, e).unwrap())
                .collect();
            for (n, a) in c.iter().enumerate() {
                let sum: BigInt = parts.iter().map(|g| &g.coeffs()[n]).sum();
                prop_assert_eq!(&sum, a);
                prop_assert_eq!(
                    parts
                        .iter()
                        .filter(|g| g.coeffs()[n] != BigInt::from(0))
                        .count()
                        <= 1,
                    true
                );
            }
            prop_assert_eq!(parts[0].level(), 4 * p * p);
            Ok(())
        },
    )
}

pub fn coeffile_round_trip(cases: u32) -> Result<(), String> {
    let big = prop::collection::vec(any::<i64>().prop_map(|x| BigInt::from(x).pow(3)), 1..80);
    let small = prop::collection::vec(
        prop::sample::select(vec![0i64, 0, 0, 1, -1, 7]).prop_map(BigInt::from),
        1..80,
    );
    run(
        cases,
        (
            prop_oneof![big, small],
            prop::option::of(1u32..30),
            prop::option::of(1u64..500),
        ),
        |(c, w, l)| {
            let mut c = c;
            c.insert(0, BigInt::from(0));
            let offset = c
                .iter()
                .position(|a| *a != BigInt::from(0))
                .unwrap_or(c.len()) as u64;
            let file = CoefficientFile {
                form_id: "random".into(),
                weight_num: w,
                level: l,
                character: l.map(DirichletCharacter::trivial),
                offset,
                coeffs: c,
            };
            let text = file.to_text();
            let back: CoefficientFile = text.parse().unwrap();
            prop_assert_eq!(&back, &file);
            prop_assert_eq!(back.to_text(), text);
            Ok(())
        },
    )
}
