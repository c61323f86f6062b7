//! Small enumeration helpers shared by the solvers.

/// k-subsets of `0..n` in lexicographic order.
pub(crate) struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        let current = if k <= n { Some((0..k).collect()) } else { None };
        Self { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Nonempty subsets of `items`, ordered by bitmask (so singletons of early
/// items come first and the full set comes last).
pub(crate) fn nonempty_subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    assert!(items.len() < 31, "too many items to enumerate subsets");
    (1u32..(1u32 << items.len()))
        .map(|mask| items.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Mixed-radix counter over `radices`, last position varying fastest.
pub(crate) struct Odometer {
    radices: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl Odometer {
    pub(crate) fn new(radices: Vec<usize>) -> Self {
        let current = if radices.iter().all(|&r| r > 0) { Some(vec![0; radices.len()]) } else { None };
        Self { radices, current }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cursor = self.current.as_mut().expect("checked above");
        let mut i = cursor.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            cursor[i] += 1;
            if cursor[i] < self.radices[i] {
                break;
            }
            cursor[i] = 0;
        }
        Some(out)
    }
}

/// Product of `factors`, saturating at `u128::MAX`.
pub(crate) fn saturating_product(factors: impl IntoIterator<Item = u128>) -> u128 {
    factors.into_iter().fold(1u128, |acc, f| acc.saturating_mul(f))
}

/// `2^n - 1`, saturating.
pub(crate) fn nonempty_subset_count(n: usize) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}
