//! Axis-aligned kd-tree for radius and nearest-neighbor queries.

use crate::points::{sq_dist, PointCloud};

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Static kd-tree over a point cloud. Holds indices only; queries take the
/// cloud it was built from.
#[derive(Debug, Clone)]
pub struct KdTree {
    nodes: Vec<Node>,
    order: Vec<usize>,
    dim: usize,
}

impl KdTree {
    pub fn build(points: &PointCloud) -> Self {
        let mut tree = Self {
            nodes: Vec::new(),
            order: (0..points.len()).collect(),
            dim: points.dim(),
        };
        tree.build_node(points, 0, points.len());
        tree
    }

    fn build_node(&mut self, points: &PointCloud, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        // split the widest axis at the median
        let axis = (0..self.dim)
            .map(|a| {
                let (lo, hi) = self.order[start..end].iter().fold(
                    (f64::INFINITY, f64::NEG_INFINITY),
                    |(lo, hi), &i| {
                        let v = points.point(i)[a];
                        (lo.min(v), hi.max(v))
                    },
                );
                (a, hi - lo)
            })
            .fold((0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            })
            .0;
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points.point(a)[axis].total_cmp(&points.point(b)[axis])
        });
        let value = points.point(self.order[mid])[axis];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(points, start, mid);
        let right = self.build_node(points, mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    /// Calls `visit(j, dist_sq)` for every point with `dist_sq <= radius^2`.
    pub fn for_each_within(
        &self,
        points: &PointCloud,
        query: &[f64],
        radius: f64,
        mut visit: impl FnMut(usize, f64),
    ) {
        let r2 = radius * radius;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            match self.nodes[id] {
                Node::Leaf { start, end } => {
                    for &j in &self.order[start..end] {
                        let d2 = sq_dist(query, points.point(j));
                        if d2 <= r2 {
                            visit(j, d2);
                        }
                    }
                }
                Node::Split {
                    axis,
                    value,
                    left,
                    right,
                } => {
                    // left holds coordinates <= value, right holds >= value
                    let diff = query[axis] - value;
                    if diff <= radius {
                        stack.push(left);
                    }
                    if diff >= -radius {
                        stack.push(right);
                    }
                }
            }
        }
    }

    /// Nearest point to `query`; ties go to the lowest index.
    pub fn nearest(&self, points: &PointCloud, query: &[f64]) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_in(points, query, 0, &mut best);
        best
    }

    fn nearest_in(&self, points: &PointCloud, query: &[f64], id: usize, best: &mut (usize, f64)) {
        match self.nodes[id] {
            Node::Leaf { start, end } => {
                for &j in &self.order[start..end] {
                    let d2 = sq_dist(query, points.point(j));
                    if d2 < best.1 || (d2 == best.1 && j < best.0) {
                        *best = (j, d2);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = query[axis] - value;
                let (near, far) = if diff <= 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.nearest_in(points, query, near, best);
                // `<=` keeps equidistant candidates with smaller indices reachable
                if diff * diff <= best.1 {
                    self.nearest_in(points, query, far, best);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(n: usize, d: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PointCloud::new((0..n * d).map(|_| rng.random::<f64>()).collect(), d).unwrap()
    }

    #[test]
    fn radius_query_matches_scan() {
        for (d, seed) in [(1, 1), (2, 2), (3, 3)] {
            let pc = cloud(700, d, seed);
            let tree = KdTree::build(&pc);
            for i in (0..pc.len()).step_by(37) {
                let mut got = Vec::new();
                tree.for_each_within(&pc, pc.point(i), 0.1, |j, _| got.push(j));
                got.sort_unstable();
                let want: Vec<usize> = (0..pc.len())
                    .filter(|&j| sq_dist(pc.point(i), pc.point(j)) <= 0.01)
                    .collect();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn nearest_matches_scan_and_breaks_ties_low() {
        let pc = cloud(500, 2, 9);
        let tree = KdTree::build(&pc);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let q = [rng.random::<f64>(), rng.random::<f64>()];
            let (j, _) = tree.nearest(&pc, &q);
            let want = (0..pc.len())
                .min_by(|&a, &b| sq_dist(&q, pc.point(a)).total_cmp(&sq_dist(&q, pc.point(b))))
                .unwrap();
            assert_eq!(j, want);
        }
        // duplicated points: the lower index wins
        let mut coords: Vec<f64> = (0..40).map(|i| (i % 20) as f64).collect();
        coords.push(5.0);
        let dup = PointCloud::new(coords, 1).unwrap();
        let tree = KdTree::build(&dup);
        assert_eq!(tree.nearest(&dup, &[5.0]).0, 5);
        assert_eq!(tree.nearest(&dup, &[12.5]).0, 12);
    }
}
