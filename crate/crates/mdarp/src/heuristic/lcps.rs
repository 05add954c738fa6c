//! Longest common contiguous run of two node sequences, used to find
//! the stretch over which two platoons (or a platoon and a solo route)
//! can travel together. Routes are compared as full node paths in
//! traversal direction, so a shared corridor driven the opposite way
//! does not match.

/// A common run: `a[start_a..start_a + len] == b[start_b..start_b + len]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lcps {
    pub start_a: usize,
    pub start_b: usize,
    pub len: usize,
}

/// Longest common contiguous subsequence of at least two nodes, or
/// `None`. Ties prefer the earliest start in `a`, then in `b`.
pub fn find_lcps<T: PartialEq>(a: &[T], b: &[T]) -> Option<Lcps> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let mut best = Lcps { start_a: 0, start_b: 0, len: 0 };
    // run[j] = length of the common run ending at a[i], b[j].
    let mut run = vec![0usize; b.len()];
    #[allow(clippy::needless_range_loop)]
    for i in 0..a.len() {
        let mut prev_diag = 0;
        for j in 0..b.len() {
            let up_left = prev_diag;
            prev_diag = run[j];
            run[j] = if a[i] == b[j] { up_left + 1 } else { 0 };
            let len = run[j];
            if len > best.len {
                best = Lcps { start_a: i + 1 - len, start_b: j + 1 - len, len };
            }
        }
    }
    (best.len >= 2).then_some(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn finds_an_interior_overlap() {
        let got = find_lcps(&[1, 2, 3, 4], &[9, 2, 3, 7]).unwrap();
        assert_eq!(got, Lcps { start_a: 1, start_b: 1, len: 2 });
    }

    #[test]
    fn disjoint_sequences_have_no_run() {
        assert_eq!(find_lcps(&[1, 2, 3], &[4, 5, 6]), None);
    }

    #[test]
    fn single_shared_nodes_do_not_count() {
        assert_eq!(find_lcps(&[1, 2, 3], &[3, 5, 1]), None);
    }

    #[test]
    fn reversed_runs_do_not_match() {
        assert_eq!(find_lcps(&[1, 2, 3, 4], &[4, 3, 2, 1]), None);
    }

    #[test]
    fn ties_prefer_the_earliest_start() {
        let got = find_lcps(&[1, 2, 9, 3, 4], &[3, 4, 8, 1, 2]).unwrap();
        assert_eq!(got, Lcps { start_a: 0, start_b: 3, len: 2 });
    }

    /// Plain quadratic-per-window oracle: try every window of `a` from
    /// longest to shortest and look it up in `b` by scanning.
    fn oracle(a: &[u8], b: &[u8]) -> Option<Lcps> {
        for len in (2..=a.len().min(b.len())).rev() {
            for start_a in 0..=a.len() - len {
                let window = &a[start_a..start_a + len];
                if let Some(start_b) =
                    (0..=b.len() - len).find(|&s| &b[s..s + len] == window)
                {
                    return Some(Lcps { start_a, start_b, len });
                }
            }
        }
        None
    }

    #[test]
    fn matches_the_scan_oracle_on_random_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for case in 0..300 {
            let n = rng.gen_range(0..14);
            let m = rng.gen_range(0..14);
            let a: Vec<u8> = (0..n).map(|_| rng.gen_range(0..5)).collect();
            let b: Vec<u8> = (0..m).map(|_| rng.gen_range(0..5)).collect();
            let got = find_lcps(&a, &b);
            let want = oracle(&a, &b);
            // The oracle scans longest-first, earliest `a` start first,
            // which is exactly the tie-break contract.
            assert_eq!(got, want, "case {case}: {a:?} vs {b:?}");
        }
    }
}
