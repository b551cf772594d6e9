use super::{Parties, Transcript};
use crate::{Error, Result};

fn bit_width(domain: u64) -> u32 {
    if domain <= 1 {
        0
    } else {
        64 - (domain - 1).leading_zeros()
    }
}

fn ceil_log2(v: u32) -> u32 {
    if v <= 1 {
        0
    } else {
        32 - (v - 1).leading_zeros()
    }
}

/// Worst-case query count of [`eq_gt_protocol`] on a domain of size `n`.
pub fn gt_query_bound(n: u64) -> usize {
    let l = bit_width(n);
    if l == 0 {
        1
    } else {
        ceil_log2(l) as usize + 2
    }
}

/// Decides `a <= b` for 0-based values below `domain` using Equality
/// queries on prefixes of the binary representations.
pub(crate) fn leq_by_prefixes(oracle: &mut Transcript, parties: &Parties<u64>, domain: u64) -> bool {
    let l = bit_width(domain);
    if oracle.equality(parties, "value", |v| *v) {
        return true;
    }
    let prefix = |v: u64, len: u32| if len == 0 { 0 } else { v >> (l - len) };
    // the common prefix has length in lo..=hi
    let (mut lo, mut hi) = (0u32, l - 1);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if oracle.equality(parties, "prefix", |v| prefix(*v, mid)) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let bit = |v: u64| (v >> (l - 1 - lo)) & 1 == 1;
    oracle.equality_split(parties, "first differing bit is 0", |v| bit(*v), |_| false)
}

/// Greater-Than on `[n]` from Equality queries: returns whether `i <= j`.
/// Indices are 1-based.
pub fn eq_gt_protocol(n: u64, i: u64, j: u64) -> Result<(bool, Transcript)> {
    if n == 0 || !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return Err(Error::Parameter(format!("indices {i}, {j} not in 1..={n}")));
    }
    let mut oracle = Transcript::new();
    let answer = leq_by_prefixes(&mut oracle, &Parties::new(i - 1, j - 1), n);
    Ok((answer, oracle))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_small_domains() {
        for n in 1..=70u64 {
            for i in 1..=n {
                for j in 1..=n {
                    let (ans, t) = eq_gt_protocol(n, i, j).unwrap();
                    assert_eq!(ans, i <= j, "n={n} i={i} j={j}");
                    assert!(t.queries() <= gt_query_bound(n));
                    assert_eq!(t.queries(), t.count(super::super::EQ));
                }
            }
        }
    }

    #[test]
    fn bound_values() {
        // L = ceil(log2 N); bound = ceil(log2 L) + 2
        assert_eq!(gt_query_bound(2), 2);
        assert_eq!(gt_query_bound(16), 4);
        assert_eq!(gt_query_bound(17), 5);
        assert_eq!(gt_query_bound(1 << 32), 7);
    }

    #[test]
    fn large_domain_samples() {
        let n = 1u64 << 40;
        for (i, j) in [(1, n), (n, 1), (12345, 12346), (n / 2, n / 2), (999_999, 3)] {
            let (ans, t) = eq_gt_protocol(n, i, j).unwrap();
            assert_eq!(ans, i <= j);
            assert!(t.queries() <= gt_query_bound(n));
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(eq_gt_protocol(4, 0, 1).is_err());
        assert!(eq_gt_protocol(4, 1, 5).is_err());
    }
}
