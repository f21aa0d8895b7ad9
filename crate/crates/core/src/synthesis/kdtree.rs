//! Static k-d tree for exact nearest-neighbour queries in small dimension.
//!
//! Nodes are stored implicitly: the point array is permuted so that every
//! subrange `[lo, hi)` has its median at `(lo + hi) / 2`, split on
//! `depth % D`. Ties on the split coordinate are harmless here, which is why
//! this is not a bucketed tree.

pub struct KdTree<const D: usize> {
    points: Vec<[f64; D]>,
    items: Vec<u32>,
}

impl<const D: usize> KdTree<D> {
    pub fn build(entries: Vec<([f64; D], u32)>) -> Self {
        let mut entries = entries;
        let len = entries.len();
        arrange(&mut entries, 0, len, 0);
        let (points, items) = entries.into_iter().unzip();
        KdTree { points, items }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Item and squared distance of the nearest point.
    pub fn nearest(&self, query: &[f64; D]) -> Option<(u32, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = (0usize, f64::INFINITY);
        self.search(query, 0, self.points.len(), 0, &mut best);
        Some((self.items[best.0], best.1))
    }

    fn search(&self, q: &[f64; D], lo: usize, hi: usize, depth: usize, best: &mut (usize, f64)) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let p = &self.points[mid];
        let d2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
        if d2 < best.1 {
            *best = (mid, d2);
        }
        let axis = depth % D;
        let delta = q[axis] - p[axis];
        let (near, far) = if delta < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(q, near.0, near.1, depth + 1, best);
        if delta * delta < best.1 {
            self.search(q, far.0, far.1, depth + 1, best);
        }
    }
}

fn arrange<const D: usize>(e: &mut [([f64; D], u32)], lo: usize, hi: usize, depth: usize) {
    if hi - lo <= 1 {
        return;
    }
    let axis = depth % D;
    let mid = (lo + hi) / 2;
    e[lo..hi].select_nth_unstable_by(mid - lo, |a, b| a.0[axis].total_cmp(&b.0[axis]));
    arrange(e, lo, mid, depth + 1);
    arrange(e, mid + 1, hi, depth + 1);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        // many repeated coordinates, as in gate-set nets
        let grid = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let pts: Vec<([f64; 4], u32)> = (0..2000)
            .map(|i| {
                let mut p = [0.0; 4];
                for c in &mut p {
                    *c = if rng.random_bool(0.5) {
                        grid[rng.random_range(0..5)]
                    } else {
                        rng.random_range(-1.0..1.0)
                    };
                }
                (p, i)
            })
            .collect();
        let tree = KdTree::build(pts.clone());
        assert_eq!(tree.len(), 2000);
        for _ in 0..500 {
            let q = [(); 4].map(|_| rng.random_range(-1.2..1.2));
            let (_, d) = tree.nearest(&q).unwrap();
            let brute = pts
                .iter()
                .map(|(p, _)| {
                    p.iter()
                        .zip(&q)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min);
            assert_eq!(d, brute);
        }
        assert!(KdTree::<3>::build(vec![]).nearest(&[0.0; 3]).is_none());
    }
}
