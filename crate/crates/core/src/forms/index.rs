//! Strictly increasing multi-indices and the sign bookkeeping around them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// The increasing `k`-subsets of `0..n` in lexicographic order, with ranks.
#[derive(Debug)]
pub struct Basis {
    pub n: usize,
    pub k: usize,
    subsets: Vec<Vec<usize>>,
    rank: HashMap<u64, usize>,
}

fn mask(idx: &[usize]) -> u64 {
    idx.iter().fold(0, |m, &i| m | (1u64 << i))
}

impl Basis {
    fn build(n: usize, k: usize) -> Basis {
        assert!(n < 64, "chart dimension too large");
        let mut subsets = Vec::with_capacity(binomial(n, k));
        let mut cur = Vec::with_capacity(k);
        fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(n, k, i + 1, cur, out);
                cur.pop();
            }
        }
        rec(n, k, 0, &mut cur, &mut subsets);
        let rank = subsets
            .iter()
            .enumerate()
            .map(|(r, s)| (mask(s), r))
            .collect();
        Basis {
            n,
            k,
            subsets,
            rank,
        }
    }

    /// Shared basis for `(n, k)`.
    pub fn get(n: usize, k: usize) -> Arc<Basis> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Basis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        cache
            .lock()
            .unwrap()
            .entry((n, k))
            .or_insert_with(|| Arc::new(Basis::build(n, k)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn subset(&self, r: usize) -> &[usize] {
        &self.subsets[r]
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    /// Rank of an increasing multi-index.
    pub fn rank(&self, idx: &[usize]) -> usize {
        debug_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        self.rank[&mask(idx)]
    }

    /// Rank and permutation sign of an arbitrary index tuple, or `None` when
    /// an index repeats.
    pub fn rank_signed(&self, idx: &[usize]) -> Option<(usize, f64)> {
        let (sorted, sign) = sort_with_sign(idx)?;
        Some((self.rank(&sorted), sign))
    }
}

/// Sorts `idx`, returning the sign of the sorting permutation; `None` if any
/// entry repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// All permutations of `0..n` with their signs (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    let mut sign = 1.0;
    out.push((a.clone(), sign));
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            sign = -sign;
            out.push((a.clone(), sign));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Determinant of a small row-major matrix: closed forms up to 3×3, Laplace
/// expansion beyond.
pub fn small_det<T: crate::expr::Real>(m: &[T], k: usize) -> T {
    match k {
        0 => T::from_f64(1.0),
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => {
            // Laplace expansion along the first row.
            let mut acc = T::from_f64(0.0);
            for c in 0..k {
                let mut minor = Vec::with_capacity((k - 1) * (k - 1));
                for r in 1..k {
                    for cc in 0..k {
                        if cc != c {
                            minor.push(m[r * k + cc]);
                        }
                    }
                }
                let term = m[c] * small_det(&minor, k - 1);
                acc = if c % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}
