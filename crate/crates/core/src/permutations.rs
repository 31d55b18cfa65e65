//! Factor-graph layer permutations and the bit-index permutations they induce.
//!
//! Reordering the `n` layers of the polar factor graph yields another valid
//! graph for the same code. Relabeling every node index by the matching
//! permutation of its binary expansion turns the reordered graph back into
//! the original one, so a single decoder handles every layer order: permute
//! the channel LLRs and the frozen set, decode, then map `û` back.
//!
//! A [`LayerPermutation`] `π` lists, for each slot `t` (slot 0 is next to the
//! message side), the original layer placed there. The induced [`IndexMap`]
//! `σ` sets bit `t` of `σ(i)` to bit `π(t)` of `i`.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{check_len, invalid, Error, Result};
use crate::polar_code::PolarCode;

/// An ordering of the `n` factor-graph layers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LayerPermutation {
    slots: Vec<usize>,
}

impl LayerPermutation {
    pub fn new(slots: Vec<usize>) -> Result<Self> {
        let n = slots.len();
        let mut seen = vec![false; n];
        for &s in &slots {
            if s >= n || seen[s] {
                return Err(invalid(format!("{slots:?} is not a permutation of 0..{n}")));
            }
            seen[s] = true;
        }
        Ok(LayerPermutation { slots })
    }

    pub fn identity(n: usize) -> Self {
        LayerPermutation {
            slots: (0..n).collect(),
        }
    }

    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    pub fn num_layers(&self) -> usize {
        self.slots.len()
    }

    pub fn is_identity(&self) -> bool {
        self.slots.iter().enumerate().all(|(t, &s)| t == s)
    }

    /// Composition chosen so that `index_map(a.compose(b))` equals
    /// `index_map(a)` applied after `index_map(b)`: `slots[t] = b[a[t]]`.
    pub fn compose(&self, other: &LayerPermutation) -> Result<LayerPermutation> {
        check_len(self.slots.len(), other.slots.len())?;
        Ok(LayerPermutation {
            slots: self.slots.iter().map(|&s| other.slots[s]).collect(),
        })
    }

    pub fn inverse(&self) -> LayerPermutation {
        let mut inv = vec![0; self.slots.len()];
        for (t, &s) in self.slots.iter().enumerate() {
            inv[s] = t;
        }
        LayerPermutation { slots: inv }
    }

    /// The bit-index permutation on `0..2^n` induced by this layer order.
    pub fn index_map(&self) -> IndexMap {
        IndexMap::from_layers(self)
    }
}

impl fmt::Display for LayerPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, s) in self.slots.iter().enumerate() {
            if t > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// A bijection on codeword positions with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexMap {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl IndexMap {
    pub fn from_layers(pi: &LayerPermutation) -> Self {
        let n = pi.num_layers();
        let len = 1usize << n;
        let mut forward = vec![0; len];
        let mut inverse = vec![0; len];
        for i in 0..len {
            let s = pi
                .slots
                .iter()
                .enumerate()
                .fold(0, |acc, (t, &src)| acc | (((i >> src) & 1) << t));
            forward[i] = s;
            inverse[s] = i;
        }
        IndexMap { forward, inverse }
    }

    pub fn identity(len: usize) -> Self {
        let v: Vec<usize> = (0..len).collect();
        IndexMap {
            forward: v.clone(),
            inverse: v,
        }
    }

    /// `forward[i] = σ(i)`.
    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    /// `σ ∘ other`.
    pub fn then_after(&self, other: &IndexMap) -> IndexMap {
        let forward: Vec<usize> = other.forward.iter().map(|&j| self.forward[j]).collect();
        let mut inverse = vec![0; forward.len()];
        for (i, &s) in forward.iter().enumerate() {
            inverse[s] = i;
        }
        IndexMap { forward, inverse }
    }

    /// `out[σ(i)] = values[i]`.
    pub fn permute<T: Copy + Default>(&self, values: &[T]) -> Result<Vec<T>> {
        check_len(self.len(), values.len())?;
        let mut out = vec![T::default(); values.len()];
        self.permute_into(values, &mut out);
        Ok(out)
    }

    pub(crate) fn permute_into<T: Copy>(&self, values: &[T], out: &mut [T]) {
        for (&v, &s) in values.iter().zip(&self.forward) {
            out[s] = v;
        }
    }

    /// `out[i] = values[σ(i)]`, the inverse of [`IndexMap::permute`].
    pub fn unpermute<T: Copy>(&self, values: &[T]) -> Result<Vec<T>> {
        check_len(self.len(), values.len())?;
        Ok(self.forward.iter().map(|&s| values[s]).collect())
    }
}

/// Channel LLRs as seen by the original decoder on the permuted graph.
pub fn permute_llrs(llrs: &[f64], map: &IndexMap) -> Result<Vec<f64>> {
    map.permute(llrs)
}

/// Maps a message estimate from the permuted domain back to original order.
pub fn unpermute_bits(u_pi: &[u8], map: &IndexMap) -> Result<Vec<u8>> {
    map.unpermute(u_pi)
}

/// Relabels the frozen set: position `σ(i)` is frozen iff `i` was.
pub fn permute_code(code: &PolarCode, map: &IndexMap) -> Result<PolarCode> {
    let mask = map.permute(code.frozen_mask())?;
    PolarCode::from_frozen_mask(mask)
}

/// The search space of layer orders that keep layers `0..n-k` in place and
/// permute the last `k` layers in every possible way (`k!` elements).
///
/// Enumeration is recursive: pick each remaining layer in turn as the next
/// slot, in ascending position order, and recurse on the rest.
pub fn form_permutation_set(n: usize, k: usize) -> Result<Vec<LayerPermutation>> {
    if k < 2 || k > n {
        return Err(invalid(format!("k = {k} must satisfy 2 <= k <= n = {n}")));
    }
    let fixed: Vec<usize> = (0..n - k).collect();
    let free: Vec<usize> = (n - k..n).collect();
    Ok(enumerate_orders(&free)
        .into_iter()
        .map(|tail| {
            let mut slots = fixed.clone();
            slots.extend(tail);
            LayerPermutation { slots }
        })
        .collect())
}

fn enumerate_orders(layers: &[usize]) -> Vec<Vec<usize>> {
    if layers.len() == 2 {
        return vec![vec![layers[0], layers[1]], vec![layers[1], layers[0]]];
    }
    let mut out = Vec::new();
    for (i, &head) in layers.iter().enumerate() {
        let rest: Vec<usize> = layers
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &l)| l)
            .collect();
        for tail in enumerate_orders(&rest) {
            let mut p = Vec::with_capacity(layers.len());
            p.push(head);
            p.extend(tail);
            out.push(p);
        }
    }
    out
}

/// The `n` cyclic rotations of the layer order, identity first.
pub fn cyclic_shift_set(n: usize) -> Vec<LayerPermutation> {
    (0..n)
        .map(|shift| LayerPermutation {
            slots: (0..n).map(|t| (t + shift) % n).collect(),
        })
        .collect()
}

/// Identity followed by `m - 1` distinct uniformly random layer orders.
pub fn random_perm_set<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    rng: &mut R,
) -> Result<Vec<LayerPermutation>> {
    let total: f64 = (1..=n).map(|v| v as f64).product();
    if m == 0 || m as f64 > total {
        return Err(invalid(format!("cannot draw {m} distinct orders of {n} layers")));
    }
    let identity = LayerPermutation::identity(n);
    let mut seen = HashSet::new();
    seen.insert(identity.clone());
    let mut out = vec![identity];
    while out.len() < m {
        let mut slots: Vec<usize> = (0..n).collect();
        slots.shuffle(rng);
        let p = LayerPermutation { slots };
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Contents of a permutation file.
///
/// ```text
/// n=7 k=4 ebno=2.5 frames=500 seed=1
/// 0 1 2 3 4 5 6 score=0
/// 0 1 2 4 3 6 5 score=0.214
/// ```
///
/// The header needs `n` and `k`; further `key=value` pairs are kept as-is.
/// Line order is priority order.
#[derive(Debug, Clone, PartialEq)]
pub struct PermFile {
    pub n: usize,
    pub k: usize,
    pub extra: Vec<(String, String)>,
    pub perms: Vec<LayerPermutation>,
    pub scores: Vec<Option<f64>>,
}

impl PermFile {
    pub fn new(n: usize, k: usize, perms: Vec<LayerPermutation>) -> Self {
        let scores = vec![None; perms.len()];
        PermFile {
            n,
            k,
            extra: Vec::new(),
            perms,
            scores,
        }
    }

    pub fn extra_value(&self, key: &str) -> Option<&str> {
        self.extra
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Error::Format {
            line: 1,
            msg: "missing header".into(),
        })?;
        let ferr = |line: usize, msg: String| Error::Format { line, msg };
        let mut n = None;
        let mut k = None;
        let mut extra = Vec::new();
        for tok in header.split_whitespace() {
            let (key, val) = tok
                .split_once('=')
                .ok_or_else(|| ferr(hline, format!("expected key=value, got {tok:?}")))?;
            let num = || {
                val.parse::<usize>()
                    .map_err(|_| ferr(hline, format!("bad value for {key}: {val:?}")))
            };
            match key {
                "n" => n = Some(num()?),
                "k" => k = Some(num()?),
                _ => extra.push((key.to_string(), val.to_string())),
            }
        }
        let n = n.ok_or_else(|| ferr(hline, "header lacks n=".into()))?;
        let k = k.ok_or_else(|| ferr(hline, "header lacks k=".into()))?;
        let mut perms = Vec::new();
        let mut scores = Vec::new();
        for (lineno, line) in lines {
            let mut slots = Vec::with_capacity(n);
            let mut score = None;
            for tok in line.split_whitespace() {
                if let Some(v) = tok.strip_prefix("score=") {
                    let s: f64 = v
                        .parse()
                        .map_err(|_| ferr(lineno, format!("bad score {v:?}")))?;
                    score = Some(s);
                } else {
                    slots.push(
                        tok.parse::<usize>()
                            .map_err(|_| ferr(lineno, format!("bad slot {tok:?}")))?,
                    );
                }
            }
            if slots.len() != n {
                return Err(ferr(lineno, format!("expected {n} slots, got {}", slots.len())));
            }
            let p = LayerPermutation::new(slots).map_err(|e| ferr(lineno, e.to_string()))?;
            perms.push(p);
            scores.push(score);
        }
        Ok(PermFile {
            n,
            k,
            extra,
            perms,
            scores,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_string())?;
        Ok(())
    }
}

impl fmt::Display for PermFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} k={}", self.n, self.k)?;
        for (key, val) in &self.extra {
            write!(f, " {key}={val}")?;
        }
        writeln!(f)?;
        for (p, s) in self.perms.iter().zip(&self.scores) {
            write!(f, "{p}")?;
            if let Some(s) = s {
                write!(f, " score={s}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
