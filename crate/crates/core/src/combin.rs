//! Small counting helpers: binomials and k-subsets in lexicographic order.

use alloc::vec::Vec;

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Iterator over the k-subsets of `0..n`, lexicographic.
#[derive(Debug, Clone)]
pub struct Subsets {
    n: usize,
    cur: Vec<usize>,
    done: bool,
}

impl Subsets {
    pub fn new(n: usize, k: usize) -> Self {
        Subsets { n, cur: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let k = self.cur.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.cur[i] < self.n - k + i {
                self.cur[i] += 1;
                for j in i + 1..k {
                    self.cur[j] = self.cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

pub fn subsets(n: usize, k: usize) -> Subsets {
    Subsets::new(n, k)
}

/// Product of the entries, `None` on u128 overflow.
pub fn checked_product<I: IntoIterator<Item = u32>>(it: I) -> Option<u128> {
    it.into_iter().try_fold(1u128, |acc, x| acc.checked_mul(x as u128))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_binomial() {
        for n in 0..9 {
            for k in 0..=n + 1 {
                assert_eq!(subsets(n, k).count() as u64, binomial(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn lexicographic() {
        let all: Vec<_> = subsets(4, 2).collect();
        assert_eq!(all, [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]);
        assert_eq!(subsets(3, 0).collect::<Vec<_>>(), [Vec::<usize>::new()]);
    }
}
