//! CART classification tree grown greedily on Gini impurity.
//!
//! Candidate thresholds are the midpoints between consecutive distinct
//! sorted values of a column. Among equally good splits the lowest column
//! index wins, then the lowest threshold, so the fitted tree does not
//! depend on row order. Leaves keep raw class counts; probabilities are
//! smoothed as `(n_c + alpha) / (n + alpha * M)` at prediction time.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_training, check_width, FeatureSubset, ModelError, ProbabilisticClassifier};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub features_per_split: FeatureSubset,
    /// Additive (Laplace) smoothing applied to leaf counts.
    pub smoothing: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_leaf: 1,
            features_per_split: FeatureSubset::All,
            smoothing: 1.0,
        }
    }
}

impl TreeParams {
    pub(crate) fn validate(&self, n_features: usize) -> Result<usize, ModelError> {
        if self.max_depth == Some(0) {
            return Err(ModelError::InvalidParameter("max_depth must be >= 1".into()));
        }
        if self.min_samples_leaf == 0 {
            return Err(ModelError::InvalidParameter(
                "min_samples_leaf must be >= 1".into(),
            ));
        }
        if !(self.smoothing.is_finite() && self.smoothing >= 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "smoothing {} must be finite and >= 0",
                self.smoothing
            )));
        }
        self.features_per_split.resolve(n_features)
    }
}

/// Arena node; children are indices into the node list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    /// Rows with `value <= threshold` go left.
    Split {
        column: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf { counts: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    n_classes: usize,
    n_features: usize,
    params: TreeParams,
}

struct Task {
    node: usize,
    start: usize,
    end: usize,
    depth: usize,
}

struct Split {
    column: usize,
    threshold: f64,
}

/// Threshold strictly separating `lo < hi`.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo * 0.5 + hi * 0.5;
    if m < lo || m >= hi {
        lo
    } else {
        m
    }
}

fn sum_of_squares(counts: &[u32]) -> u64 {
    counts.iter().map(|&c| u64::from(c) * u64::from(c)).sum()
}

/// Gini impurity decrease of splitting a node with class counts `parent`
/// into `left` and `right`.
pub fn gini_decrease(parent: &[u32], left: &[u32], right: &[u32]) -> f64 {
    let gini = |c: &[u32]| {
        let n: u32 = c.iter().sum();
        if n == 0 {
            return 0.0;
        }
        1.0 - c
            .iter()
            .map(|&k| (f64::from(k) / f64::from(n)).powi(2))
            .sum::<f64>()
    };
    let n = f64::from(parent.iter().sum::<u32>());
    let nl = f64::from(left.iter().sum::<u32>());
    let nr = f64::from(right.iter().sum::<u32>());
    gini(parent) - nl / n * gini(left) - nr / n * gini(right)
}

struct Grower<'a> {
    x: &'a Matrix,
    y: &'a [usize],
    n_classes: usize,
    params: &'a TreeParams,
    per_split: usize,
    pairs: Vec<(f64, u32)>,
    left: Vec<u32>,
    right: Vec<u32>,
}

impl Grower<'_> {
    fn counts(&self, rows: &[usize]) -> Vec<u32> {
        let mut counts = vec![0u32; self.n_classes];
        for &r in rows {
            counts[self.y[r]] += 1;
        }
        counts
    }

    fn candidate_columns<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let d = self.x.cols();
        if self.per_split >= d {
            return (0..d).collect();
        }
        let mut cols = rand::seq::index::sample(rng, d, self.per_split).into_vec();
        cols.sort_unstable();
        cols
    }

    /// Best split of `rows` over `columns`, maximizing
    /// `sum_l(c^2)/n_l + sum_r(c^2)/n_r`, which orders splits the same way
    /// as the Gini decrease.
    fn best_split(&mut self, rows: &[usize], parent: &[u32], columns: &[usize]) -> Option<Split> {
        let n = rows.len();
        let min_leaf = self.params.min_samples_leaf;
        let parent_sq = sum_of_squares(parent);
        let mut best: Option<(f64, Split)> = None;

        for &col in columns {
            self.pairs.clear();
            self.pairs
                .extend(rows.iter().map(|&r| (self.x.get(r, col), self.y[r] as u32)));
            self.pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            if self.pairs[0].0 == self.pairs[n - 1].0 {
                continue;
            }

            self.left.iter_mut().for_each(|c| *c = 0);
            self.right.copy_from_slice(parent);
            let mut left_sq = 0u64;
            let mut right_sq = parent_sq;
            for i in 0..n - 1 {
                let c = self.pairs[i].1 as usize;
                left_sq += 2 * u64::from(self.left[c]) + 1;
                self.left[c] += 1;
                right_sq -= 2 * u64::from(self.right[c]) - 1;
                self.right[c] -= 1;

                let (lo, hi) = (self.pairs[i].0, self.pairs[i + 1].0);
                if lo == hi {
                    continue;
                }
                let n_left = i + 1;
                let n_right = n - n_left;
                if n_left < min_leaf {
                    continue;
                }
                if n_right < min_leaf {
                    break;
                }
                let score = left_sq as f64 / n_left as f64 + right_sq as f64 / n_right as f64;
                if best.as_ref().map_or(true, |(s, _)| score > *s) {
                    best = Some((
                        score,
                        Split {
                            column: col,
                            threshold: midpoint(lo, hi),
                        },
                    ));
                }
            }
        }
        best.map(|(_, s)| s)
    }
}

impl DecisionTree {
    /// Grows a tree on all rows of `x`.
    pub fn fit<R: Rng + ?Sized>(
        x: &Matrix,
        y: &[usize],
        n_classes: usize,
        params: &TreeParams,
        rng: &mut R,
    ) -> Result<DecisionTree, ModelError> {
        check_training(x, y, n_classes)?;
        Self::fit_rows(x, y, n_classes, params, (0..x.rows()).collect(), rng)
    }

    /// Grows a tree on the listed rows; repeated indices act as weights.
    /// Inputs must already be validated.
    pub(crate) fn fit_rows<R: Rng + ?Sized>(
        x: &Matrix,
        y: &[usize],
        n_classes: usize,
        params: &TreeParams,
        mut rows: Vec<usize>,
        rng: &mut R,
    ) -> Result<DecisionTree, ModelError> {
        let per_split = params.validate(x.cols())?;
        if rows.is_empty() {
            return Err(ModelError::EmptyTrainingData);
        }
        let mut grower = Grower {
            x,
            y,
            n_classes,
            params,
            per_split,
            pairs: Vec::with_capacity(rows.len()),
            left: vec![0; n_classes],
            right: vec![0; n_classes],
        };

        let mut nodes = vec![Node::Leaf { counts: Vec::new() }];
        let mut stack = vec![Task {
            node: 0,
            start: 0,
            end: rows.len(),
            depth: 0,
        }];
        while let Some(task) = stack.pop() {
            let node_rows = &mut rows[task.start..task.end];
            let counts = grower.counts(node_rows);
            let n = node_rows.len();
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let at_depth = params.max_depth.is_some_and(|d| task.depth >= d);
            if pure || at_depth || n < 2 * params.min_samples_leaf {
                nodes[task.node] = Node::Leaf { counts };
                continue;
            }
            let columns = grower.candidate_columns(rng);
            let Some(split) = grower.best_split(node_rows, &counts, &columns) else {
                nodes[task.node] = Node::Leaf { counts };
                continue;
            };

            let mut mid = 0;
            for i in 0..n {
                if x.get(node_rows[i], split.column) <= split.threshold {
                    node_rows.swap(i, mid);
                    mid += 1;
                }
            }
            let left = nodes.len();
            let right = left + 1;
            nodes.push(Node::Leaf { counts: Vec::new() });
            nodes.push(Node::Leaf { counts: Vec::new() });
            nodes[task.node] = Node::Split {
                column: split.column,
                threshold: split.threshold,
                left,
                right,
            };
            stack.push(Task {
                node: right,
                start: task.start + mid,
                end: task.end,
                depth: task.depth + 1,
            });
            stack.push(Task {
                node: left,
                start: task.start,
                end: task.start + mid,
                depth: task.depth + 1,
            });
        }

        Ok(DecisionTree {
            nodes,
            n_classes,
            n_features: x.cols(),
            params: params.clone(),
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    /// Class counts of the leaf `row` lands in.
    pub fn leaf_counts(&self, row: &[f64]) -> &[u32] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split {
                    column,
                    threshold,
                    left,
                    right,
                } => i = if row[*column] <= *threshold { *left } else { *right },
                Node::Leaf { counts } => return counts,
            }
        }
    }

    /// Writes the smoothed leaf distribution for `row` into `out`.
    pub(crate) fn leaf_proba_into(&self, row: &[f64], out: &mut [f64]) {
        let counts = self.leaf_counts(row);
        let alpha = self.params.smoothing;
        let total: u32 = counts.iter().sum();
        let denom = f64::from(total) + alpha * self.n_classes as f64;
        for (p, &c) in out.iter_mut().zip(counts) {
            *p = (f64::from(c) + alpha) / denom;
        }
    }

    /// Length of the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut deepest = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, d)) = stack.pop() {
            match &self.nodes[i] {
                Node::Split { left, right, .. } => {
                    stack.push((*left, d + 1));
                    stack.push((*right, d + 1));
                }
                Node::Leaf { .. } => deepest = deepest.max(d),
            }
        }
        deepest
    }

    pub fn leaves(&self) -> impl Iterator<Item = &[u32]> {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf { counts } => Some(counts.as_slice()),
            Node::Split { .. } => None,
        })
    }
}

impl ProbabilisticClassifier for DecisionTree {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, x: &Matrix) -> Result<Matrix, ModelError> {
        check_width(self.n_features, x)?;
        let mut out = Matrix::zeros(x.rows(), self.n_classes);
        out.as_mut_slice()
            .par_chunks_mut(self.n_classes)
            .enumerate()
            .for_each(|(i, p)| self.leaf_proba_into(x.row(i), p));
        Ok(out)
    }
}
