//! Dense tensors over binary indices and pairwise contraction.

use crate::scalar::Scalar;

/// A tensor whose legs carry wire labels; leg 0 is the most significant bit
/// of the flat index.
#[derive(Clone, Debug)]
pub(crate) struct Tensor<S> {
    pub legs: Vec<u32>,
    pub data: Vec<S>,
}

fn bit(x: usize, pos: usize, len: usize) -> usize {
    (x >> (len - 1 - pos)) & 1
}

impl<S: Scalar> Tensor<S> {
    pub fn scalar(v: S) -> Self {
        Tensor {
            legs: Vec::new(),
            data: vec![v],
        }
    }

    /// Sums over repeated labels (self-loops).
    pub fn trace_repeats(self) -> Self {
        let mut t = self;
        loop {
            let n = t.legs.len();
            let pair = (0..n).find_map(|p| ((p + 1)..n).find(|&q| t.legs[q] == t.legs[p]).map(|q| (p, q)));
            let Some((p, q)) = pair else {
                return t;
            };
            let keep: Vec<usize> = (0..n).filter(|&i| i != p && i != q).collect();
            let m = keep.len();
            let mut data = vec![S::zero(); 1 << m];
            for (x, slot) in data.iter_mut().enumerate() {
                for b in 0..2usize {
                    let mut idx = 0usize;
                    let mut ki = 0;
                    for i in 0..n {
                        let v = if i == p || i == q {
                            b
                        } else {
                            let v = bit(x, ki, m);
                            ki += 1;
                            v
                        };
                        idx = (idx << 1) | v;
                    }
                    let v = t.data[idx].clone();
                    *slot = slot.clone() + v;
                }
            }
            t = Tensor {
                legs: keep.iter().map(|&i| t.legs[i]).collect(),
                data,
            };
        }
    }

    /// Contracts all labels shared with `other`; free legs of `self` come
    /// first in the result.
    pub fn contract(&self, other: &Tensor<S>) -> Tensor<S> {
        let shared: Vec<u32> = self
            .legs
            .iter()
            .copied()
            .filter(|l| other.legs.contains(l))
            .collect();
        let a_free: Vec<usize> = (0..self.legs.len())
            .filter(|&i| !shared.contains(&self.legs[i]))
            .collect();
        let b_free: Vec<usize> = (0..other.legs.len())
            .filter(|&i| !shared.contains(&other.legs[i]))
            .collect();
        let weights = |legs: &[u32], positions: &[usize]| -> Vec<usize> {
            let n = legs.len();
            positions.iter().map(|&p| 1usize << (n - 1 - p)).collect()
        };
        let a_sh: Vec<usize> = shared
            .iter()
            .map(|l| self.legs.iter().position(|x| x == l).unwrap())
            .collect();
        let b_sh: Vec<usize> = shared
            .iter()
            .map(|l| other.legs.iter().position(|x| x == l).unwrap())
            .collect();
        let table = |w: &[usize]| -> Vec<usize> {
            let k = w.len();
            (0..1usize << k)
                .map(|x| (0..k).map(|i| bit(x, i, k) * w[i]).sum())
                .collect()
        };
        let a_base = table(&weights(&self.legs, &a_free));
        let b_base = table(&weights(&other.legs, &b_free));
        let a_off = table(&weights(&self.legs, &a_sh));
        let b_off = table(&weights(&other.legs, &b_sh));

        let nb = b_base.len();
        let mut data = vec![S::zero(); a_base.len() * nb];
        for (ra, &ab) in a_base.iter().enumerate() {
            for (s, &ao) in a_off.iter().enumerate() {
                let x = &self.data[ab + ao];
                if x.is_zero() {
                    continue;
                }
                let bo = b_off[s];
                for (rb, &bb) in b_base.iter().enumerate() {
                    let y = &other.data[bb + bo];
                    if y.is_zero() {
                        continue;
                    }
                    let slot = &mut data[ra * nb + rb];
                    *slot = slot.clone() + x.clone() * y.clone();
                }
            }
        }
        let legs = a_free
            .iter()
            .map(|&i| self.legs[i])
            .chain(b_free.iter().map(|&i| other.legs[i]))
            .collect();
        Tensor { legs, data }
    }

    /// Reorders legs to `order` (a permutation of the current labels).
    pub fn permute(&self, order: &[u32]) -> Tensor<S> {
        let n = self.legs.len();
        let src: Vec<usize> = order
            .iter()
            .map(|l| self.legs.iter().position(|x| x == l).expect("label present"))
            .collect();
        let mut data = vec![S::zero(); self.data.len()];
        for (x, slot) in data.iter_mut().enumerate() {
            let mut idx = 0usize;
            for (pos, &s) in src.iter().enumerate() {
                idx |= bit(x, pos, n) << (n - 1 - s);
            }
            *slot = self.data[idx].clone();
        }
        Tensor {
            legs: order.to_vec(),
            data,
        }
    }
}

/// Contracts a network greedily: repeatedly join the pair of tensors sharing
/// a label whose result has the fewest legs (ties by position). Unconnected
/// pieces are joined by outer products at the end.
pub(crate) fn contract_network<S: Scalar>(mut ts: Vec<Tensor<S>>) -> Tensor<S> {
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in 0..ts.len() {
            for j in (i + 1)..ts.len() {
                let shared = ts[i].legs.iter().filter(|l| ts[j].legs.contains(l)).count();
                if shared == 0 {
                    continue;
                }
                let rank = ts[i].legs.len() + ts[j].legs.len() - 2 * shared;
                if best.is_none_or(|(r, _, _)| rank < r) {
                    best = Some((rank, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else {
            break;
        };
        let b = ts.remove(j);
        let a = ts.remove(i);
        ts.insert(i, a.contract(&b));
    }
    ts.into_iter()
        .reduce(|a, b| a.contract(&b))
        .unwrap_or_else(|| Tensor::scalar(S::one()))
}
