//! Reference implementations shared by the integration and acceptance tests.
//! They are deliberately naive and do not reuse the library's graph layout.

#![allow(dead_code)]

use polar_perm::bp::{boxplus, CLIP};

/// Generator matrix row-by-row: `G_N[i][j] = 1` iff `j & !i == 0`
/// (bit pattern of `j` is a subset of that of `i`), the closed form of the
/// `n`-fold Kronecker power of `[[1,0],[1,1]]`.
pub fn kronecker_matrix(len: usize) -> Vec<Vec<u8>> {
    fn kron(a: &[Vec<u8>], b: &[Vec<u8>]) -> Vec<Vec<u8>> {
        let (ra, rb) = (a.len(), b.len());
        let mut out = vec![vec![0u8; ra * rb]; ra * rb];
        for i in 0..ra {
            for j in 0..ra {
                for p in 0..rb {
                    for q in 0..rb {
                        out[i * rb + p][j * rb + q] = a[i][j] & b[p][q];
                    }
                }
            }
        }
        out
    }
    let g = vec![vec![1, 0], vec![1, 1]];
    let mut m = vec![vec![1u8]];
    while m.len() < len {
        m = kron(&m, &g);
    }
    m
}

/// `x = u G` over GF(2).
pub fn encode_with_matrix(u: &[u8], g: &[Vec<u8>]) -> Vec<u8> {
    let len = u.len();
    (0..len)
        .map(|j| (0..len).fold(0u8, |acc, i| acc ^ (u[i] & g[i][j])))
        .collect()
}

fn clip(v: f64) -> f64 {
    v.clamp(-CLIP, CLIP)
}

/// BP on a factor graph whose stage `s` (between node columns `s` and
/// `s + 1`) is built from butterflies of stride `2^order[s]`, i.e. the
/// original layers wired in the order `order`. The frozen set and channel
/// LLRs are attached unchanged. Returns the u-side hard decisions after
/// each of `iterations` flooding iterations.
pub fn rewired_bp_decisions(
    llrs: &[f64],
    frozen: &[bool],
    order: &[usize],
    iterations: usize,
) -> Vec<Vec<u8>> {
    let len = llrs.len();
    let n = order.len();
    assert_eq!(1 << n, len);
    let mut l = vec![vec![0.0f64; len]; n + 1];
    let mut r = vec![vec![0.0f64; len]; n + 1];
    for i in 0..len {
        l[n][i] = clip(llrs[i]);
        r[0][i] = if frozen[i] { CLIP } else { 0.0 };
    }
    // Butterfly pairs of each stage: (upper, lower) with the stage bit clear
    // on the upper row.
    let pairs: Vec<Vec<(usize, usize)>> = order
        .iter()
        .map(|&layer| {
            let bit = 1usize << layer;
            (0..len).filter(|i| i & bit == 0).map(|i| (i, i | bit)).collect()
        })
        .collect();

    let mut out = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        for s in (0..n).rev() {
            for &(i, j) in &pairs[s] {
                l[s][i] = boxplus(l[s + 1][i], r[s][j] + l[s + 1][j]);
                l[s][j] = clip(boxplus(l[s + 1][i], r[s][i]) + l[s + 1][j]);
            }
        }
        for s in 0..n {
            for &(i, j) in &pairs[s] {
                r[s + 1][i] = boxplus(r[s][i], l[s + 1][j] + r[s][j]);
                r[s + 1][j] = clip(boxplus(r[s][i], l[s + 1][i]) + r[s][j]);
            }
        }
        out.push(
            (0..len)
                .map(|i| u8::from(r[0][i] + l[0][i] < 0.0))
                .collect(),
        );
    }
    out
}

/// Every permutation of `0..n` in lexicographic order.
pub fn all_orders(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for idx in 0..left.len() {
            let v = left.remove(idx);
            prefix.push(v);
            rec(prefix, left, out);
            prefix.pop();
            left.insert(idx, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}
