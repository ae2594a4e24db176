//! Cross-checks against naive i128 computations that share no code with the
//! series machinery.

use halfint_core::forms::{delta_form, g_form, ramanujan_delta, x0_11_form};
use halfint_core::signs;
use num_bigint::BigInt;

const N: usize = 400;

fn mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut out = vec![0; a.len().min(b.len())];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(out.len() - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `Π_{n>=1} (1 - q^(mn))` up to `q^(len-1)`, by literal multiplication.
fn product(m: usize, len: usize) -> Vec<i128> {
    let mut acc = vec![0; len];
    acc[0] = 1;
    for n in 1.. {
        if m * n >= len {
            break;
        }
        for i in (m * n..len).rev() {
            acc[i] -= acc[i - m * n];
        }
    }
    acc
}

fn shift(a: &[i128], by: usize) -> Vec<i128> {
    let mut out = vec![0; a.len()];
    out[by..].copy_from_slice(&a[..a.len() - by]);
    out
}

fn theta(m: usize, len: usize) -> Vec<i128> {
    let mut out = vec![0; len];
    out[0] = 1;
    for n in 1.. {
        if m * n * n >= len {
            break;
        }
        out[m * n * n] += 2;
    }
    out
}

fn big(v: &[i128]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn tau_from_literal_product() {
    let e = product(1, N + 1);
    let mut p = vec![0; N + 1];
    p[0] = 1;
    for _ in 0..24 {
        p = mul(&p, &e);
    }
    assert_eq!(
        ramanujan_delta(N as u64).unwrap().coeffs(),
        big(&shift(&p, 1))
    );
}

#[test]
fn x0_11_from_literal_product() {
    let a = product(1, N + 1);
    let b = product(11, N + 1);
    let g = mul(&mul(&a, &a), &mul(&b, &b));
    assert_eq!(x0_11_form(N as u64).unwrap().coeffs(), big(&shift(&g, 1)));
}

#[test]
fn g_from_literal_product() {
    let len = 4 * N + 1;
    let pre = shift(
        &mul(&theta(11, len), &mul(&product(2, len), &product(22, len))),
        1,
    );
    let want: Vec<i128> = (0..=N).map(|n| pre[4 * n] / 2).collect();
    assert!((0..=N).all(|n| pre[4 * n] % 2 == 0));
    assert_eq!(g_form(N as u64).unwrap().coeffs(), big(&want));
}

#[test]
fn delta_form_from_divisor_sums() {
    let sigma3 = |n: usize| -> i128 {
        (1..=n)
            .filter(|d| n.is_multiple_of(*d))
            .map(|d| (d as i128).pow(3))
            .sum()
    };
    let len = N + 1;
    let mut e4 = vec![0i128; len];
    let mut de4 = vec![0i128; len];
    e4[0] = 1;
    for n in 1..len / 4 + 1 {
        if 4 * n < len {
            e4[4 * n] = 240 * sigma3(n);
            de4[4 * n] = 240 * n as i128 * sigma3(n);
        }
    }
    let th = theta(1, len);
    let dth: Vec<i128> = th.iter().enumerate().map(|(n, c)| n as i128 * c).collect();
    let lhs = mul(&e4, &dth);
    let rhs = mul(&de4, &th);
    let want: Vec<i128> = (0..len).map(|n| (2 * lhs[n] - rhs[n]) / 4).collect();
    assert!((0..len).all(|n| (2 * lhs[n] - rhs[n]) % 4 == 0));
    assert_eq!(delta_form(N as u64).unwrap().coeffs(), big(&want));
}

#[test]
fn power_sequences_change_sign_beyond_precision() {
    let f = delta_form(100_000).unwrap();
    for (p, m_max) in [(3, 6), (5, 6)] {
        let r = signs::power_sequence_signs(&f, 1, p, m_max).unwrap();
        assert_eq!(r.terms.len(), m_max + 1);
        assert!(r.sign_change_count >= 1, "p = {p}: {:?}", r.terms);
    }
}
