//! Range-partitioned evaluation. Work over an index space `0..len` is cut into
//! contiguous chunks; partial results come back in chunk order, so exact
//! integer reductions are identical for every thread count.

use std::ops::Range;

use rayon::prelude::*;

/// How many worker threads a computation may use. `1` runs inline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exec {
    threads: usize,
}

impl Default for Exec {
    fn default() -> Self {
        Exec::sequential()
    }
}

impl Exec {
    pub const fn sequential() -> Self {
        Exec { threads: 1 }
    }

    pub fn with_threads(threads: usize) -> Self {
        Exec {
            threads: threads.max(1),
        }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Evaluates `f` on contiguous chunks covering `0..len`, returning the
    /// partial results in ascending chunk order.
    pub fn map_chunks<T, F>(&self, len: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<u64>) -> T + Sync,
    {
        if self.threads <= 1 || len < 2 {
            return vec![f(0..len)];
        }
        let chunks = (self.threads as u64 * 8).min(len);
        let step = len.div_ceil(chunks);
        let ranges: Vec<Range<u64>> = (0..chunks)
            .map(|c| c * step..((c + 1) * step).min(len))
            .filter(|r| !r.is_empty())
            .collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .expect("thread pool");
        pool.install(|| ranges.into_par_iter().map(&f).collect())
    }

    /// Sum of `f` over chunks of `0..len`.
    pub fn sum_range<Z, F>(&self, len: u64, f: F) -> Z
    where
        Z: Send + num_traits::Zero,
        F: Fn(Range<u64>) -> Z + Sync,
    {
        self.map_chunks(len, f)
            .into_iter()
            .fold(Z::zero(), |acc, x| acc + x)
    }
}

/// Mixed-radix odometer over `radix^len` tuples, starting at a flat index.
#[derive(Debug, Clone)]
pub struct Odometer {
    digits: Vec<u32>,
    radix: u32,
}

impl Odometer {
    pub fn starting_at(len: usize, radix: u32, mut index: u64) -> Self {
        let mut digits = vec![0u32; len];
        for d in digits.iter_mut() {
            *d = (index % radix as u64) as u32;
            index /= radix as u64;
        }
        Odometer { digits, radix }
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Advances by one; returns the position of the highest digit that changed,
    /// or `None` on wrap-around.
    #[inline]
    pub fn advance(&mut self) -> Option<usize> {
        for (i, d) in self.digits.iter_mut().enumerate() {
            *d += 1;
            if *d < self.radix {
                return Some(i);
            }
            *d = 0;
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range_in_order() {
        for threads in [1, 2, 3, 8] {
            let ex = Exec::with_threads(threads);
            let parts = ex.map_chunks(1000, |r| r);
            let mut next = 0;
            for r in parts {
                assert_eq!(r.start, next);
                next = r.end;
            }
            assert_eq!(next, 1000);
            let s: u64 = ex.sum_range(1000, |r| r.sum::<u64>());
            assert_eq!(s, 999 * 1000 / 2);
        }
    }

    #[test]
    fn odometer_matches_flat_index() {
        let mut od = Odometer::starting_at(3, 3, 5);
        assert_eq!(od.digits(), &[2, 1, 0]);
        od.advance();
        assert_eq!(od.digits(), &[0, 2, 0]);
        let mut od = Odometer::starting_at(2, 2, 3);
        assert_eq!(od.advance(), None);
        assert_eq!(od.digits(), &[0, 0]);
    }
}
