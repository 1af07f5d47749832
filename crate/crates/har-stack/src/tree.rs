//! CART decision trees plus the bagged ensembles built on them: bagging,
//! random forest, and extremely randomized trees (random split thresholds
//! on random candidate features, no bootstrap).
//!
//! Trees are stored as flat arenas. Building walks nodes in depth-first
//! preorder (left child first); every random draw a tree makes comes from
//! its own `(seed, kind, tree_index)` stream in that fixed order, so
//! parallel and sequential fits produce identical forests.

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::classifier::{check_feature_width, ClassLabel, TrainedClassifier};
use crate::error::{Error, Result};
use crate::random::{RngSeed, RngStream};

/// Column-contiguous copy of a feature matrix; tree fitting is entirely
/// per-feature scans, which this keeps cache-friendly.
#[derive(Debug, Clone)]
pub struct ColumnMatrix {
    data: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
}

impl ColumnMatrix {
    pub fn from_rows(x: ArrayView2<'_, f64>) -> Self {
        let (n_rows, n_cols) = x.dim();
        let mut data = vec![0.0; n_rows * n_cols];
        for (i, row) in x.outer_iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                data[j * n_rows + i] = v;
            }
        }
        ColumnMatrix {
            data,
            n_rows,
            n_cols,
        }
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.n_rows..(j + 1) * self.n_rows]
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitter {
    /// Scan midpoints of sorted unique values per candidate feature.
    Best,
    /// One uniform threshold in `[min, max)` per candidate feature.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateFeatures {
    All,
    Count(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        class_counts: Vec<u32>,
    },
}

/// A fitted CART tree; `nodes[0]` is the root. Routing sends a sample
/// left iff `x[feature] < threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<TreeNode>,
    pub n_classes: usize,
    pub n_features: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartParams {
    /// Maximum edges from root to leaf; `None` grows until pure.
    pub max_depth: Option<usize>,
    pub min_leaf_samples: usize,
    pub candidate_features: CandidateFeatures,
    pub splitter: Splitter,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams {
            max_depth: None,
            min_leaf_samples: 1,
            candidate_features: CandidateFeatures::All,
            splitter: Splitter::Best,
        }
    }
}

struct WorkItem {
    start: usize,
    end: usize,
    depth: usize,
    parent: usize,
    is_left: bool,
}

const NO_PARENT: usize = usize::MAX;

struct TreeBuilder<'a> {
    columns: &'a ColumnMatrix,
    y: &'a [ClassLabel],
    n_classes: usize,
    params: CartParams,
    // scratch
    pairs: Vec<(f64, u32)>,
    left_counts: Vec<u32>,
    pool: Vec<usize>,
}

/// Evaluated candidate split: lower `(weighted_gini, feature, threshold)`
/// wins, which makes tie-breaks deterministic.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    weighted_gini: f64,
    feature: usize,
    threshold: f64,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        (self.weighted_gini, self.feature, self.threshold)
            < (other.weighted_gini, other.feature, other.threshold)
    }
}

impl<'a> TreeBuilder<'a> {
    fn class_counts(&self, samples: &[u32]) -> Vec<u32> {
        let mut counts = vec![0u32; self.n_classes];
        for &i in samples {
            counts[self.y[i as usize]] += 1;
        }
        counts
    }

    /// Best-splitter scan of one feature over the node's samples.
    fn scan_best(&mut self, feature: usize, samples: &[u32], total: &[u32]) -> Option<Candidate> {
        let col = self.columns.column(feature);
        let m = samples.len();
        self.pairs.clear();
        for &i in samples {
            self.pairs.push((col[i as usize], i));
        }
        self.pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        if self.pairs[0].0 == self.pairs[m - 1].0 {
            return None; // constant feature
        }

        let min_leaf = self.params.min_leaf_samples;
        let total_f: Vec<f64> = total.iter().map(|&c| c as f64).collect();
        let total_sumsq: f64 = total_f.iter().map(|c| c * c).sum();
        for c in self.left_counts.iter_mut() {
            *c = 0;
        }
        let mut left_sumsq = 0.0f64;
        let mut right_sumsq = total_sumsq;
        let mut best: Option<Candidate> = None;
        for p in 0..m - 1 {
            let (value, idx) = self.pairs[p];
            let cls = self.y[idx as usize];
            let c_left = self.left_counts[cls] as f64;
            let c_right = total_f[cls] - c_left;
            left_sumsq += 2.0 * c_left + 1.0;
            right_sumsq -= 2.0 * c_right - 1.0;
            self.left_counts[cls] += 1;

            let next_value = self.pairs[p + 1].0;
            if next_value == value {
                continue;
            }
            let n_left = p + 1;
            let n_right = m - n_left;
            if n_left < min_leaf || n_right < min_leaf {
                continue;
            }
            // weighted gini = m - (sumsq_l/n_l + sumsq_r/n_r), scanning for
            // the minimum; the constant m cancels
            let quality = left_sumsq / n_left as f64 + right_sumsq / n_right as f64;
            let weighted_gini = m as f64 - quality;
            let mut threshold = 0.5 * (value + next_value);
            if threshold <= value {
                threshold = next_value; // midpoint rounded down to `value`
            }
            let cand = Candidate {
                weighted_gini,
                feature,
                threshold,
            };
            if best.map_or(true, |b| cand.better_than(&b)) {
                best = Some(cand);
            }
        }
        best
    }

    /// Random-splitter evaluation of one feature: a single uniform
    /// threshold in `[min, max)`.
    fn scan_random(
        &mut self,
        feature: usize,
        samples: &[u32],
        total: &[u32],
        rng: &mut RngStream,
    ) -> Option<Candidate> {
        let col = self.columns.column(feature);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &i in samples {
            let v = col[i as usize];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo == hi {
            return None; // constant feature, no threshold drawn
        }
        let threshold = rng.uniform(lo, hi);
        if threshold <= lo {
            return None; // degenerate draw at the left edge
        }
        for c in self.left_counts.iter_mut() {
            *c = 0;
        }
        let mut n_left = 0usize;
        for &i in samples {
            if col[i as usize] < threshold {
                self.left_counts[self.y[i as usize]] += 1;
                n_left += 1;
            }
        }
        let n_right = samples.len() - n_left;
        if n_left < self.params.min_leaf_samples || n_right < self.params.min_leaf_samples {
            return None;
        }
        let mut left_sumsq = 0.0;
        let mut right_sumsq = 0.0;
        for (c, &t) in self.left_counts.iter().zip(total) {
            let l = *c as f64;
            let r = t as f64 - l;
            left_sumsq += l * l;
            right_sumsq += r * r;
        }
        let quality = left_sumsq / n_left as f64 + right_sumsq / n_right as f64;
        Some(Candidate {
            weighted_gini: samples.len() as f64 - quality,
            feature,
            threshold,
        })
    }

    fn choose_split(
        &mut self,
        samples: &[u32],
        total: &[u32],
        rng: &mut RngStream,
    ) -> Option<(usize, f64)> {
        let d = self.columns.n_cols();
        let candidates: Vec<usize> = match self.params.candidate_features {
            CandidateFeatures::All => (0..d).collect(),
            CandidateFeatures::Count(k) => rng.choose_distinct(k.min(d), d, &mut self.pool),
        };
        let mut best: Option<Candidate> = None;
        for feature in candidates {
            let cand = match self.params.splitter {
                Splitter::Best => self.scan_best(feature, samples, total),
                Splitter::Random => self.scan_random(feature, samples, total, rng),
            };
            if let Some(c) = cand {
                if best.map_or(true, |b| c.better_than(&b)) {
                    best = Some(c);
                }
            }
        }
        best.map(|c| (c.feature, c.threshold))
    }

    fn build(&mut self, samples: &mut [u32], rng: &mut RngStream) -> Vec<TreeNode> {
        let mut nodes: Vec<TreeNode> = Vec::new();
        let mut stack = vec![WorkItem {
            start: 0,
            end: samples.len(),
            depth: 0,
            parent: NO_PARENT,
            is_left: false,
        }];
        while let Some(item) = stack.pop() {
            let slot = nodes.len();
            if item.parent != NO_PARENT {
                if let TreeNode::Internal { left, right, .. } = &mut nodes[item.parent] {
                    if item.is_left {
                        *left = slot;
                    } else {
                        *right = slot;
                    }
                }
            }
            let range = &mut samples[item.start..item.end];
            let counts = self.class_counts(range);
            let m = range.len();
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let depth_capped = self.params.max_depth.is_some_and(|d| item.depth >= d);
            let too_small = m < 2 * self.params.min_leaf_samples.max(1);

            let split = if pure || depth_capped || too_small {
                None
            } else {
                self.choose_split(range, &counts, rng)
            };

            match split {
                None => nodes.push(TreeNode::Leaf {
                    class_counts: counts,
                }),
                Some((feature, threshold)) => {
                    let col = self.columns.column(feature);
                    // two-pointer partition: left block gets x < threshold
                    let mut lo = 0;
                    let mut hi = m;
                    while lo < hi {
                        if col[range[lo] as usize] < threshold {
                            lo += 1;
                        } else {
                            hi -= 1;
                            range.swap(lo, hi);
                        }
                    }
                    debug_assert!(lo > 0 && lo < m);
                    nodes.push(TreeNode::Internal {
                        feature,
                        threshold,
                        left: 0,
                        right: 0,
                    });
                    let mid = item.start + lo;
                    stack.push(WorkItem {
                        start: mid,
                        end: item.end,
                        depth: item.depth + 1,
                        parent: slot,
                        is_left: false,
                    });
                    stack.push(WorkItem {
                        start: item.start,
                        end: mid,
                        depth: item.depth + 1,
                        parent: slot,
                        is_left: true,
                    });
                }
            }
        }
        nodes
    }
}

/// Extra-trees node split: draws `n_candidates` distinct features, one
/// uniform threshold in `[min, max)` for each non-constant one, and keeps
/// the candidate with the lowest weighted child Gini impurity. Returns
/// `None` when every candidate is constant (the node becomes a leaf).
pub fn extra_trees_node_split(
    columns: &ColumnMatrix,
    samples: &[u32],
    y: &[ClassLabel],
    n_classes: usize,
    n_candidates: usize,
    rng: &mut RngStream,
) -> Option<(usize, f64)> {
    let mut builder = TreeBuilder {
        columns,
        y,
        n_classes,
        params: CartParams {
            candidate_features: CandidateFeatures::Count(n_candidates),
            splitter: Splitter::Random,
            ..CartParams::default()
        },
        pairs: Vec::new(),
        left_counts: vec![0; n_classes],
        pool: Vec::new(),
    };
    let counts = builder.class_counts(samples);
    builder.choose_split(samples, &counts, rng)
}

fn validate_training_input(
    x: ArrayView2<'_, f64>,
    y: &[ClassLabel],
    n_classes: usize,
) -> Result<()> {
    if x.nrows() == 0 {
        return Err(Error::validation("empty training data"));
    }
    if x.nrows() != y.len() {
        return Err(Error::shape(
            format!("{} rows", x.nrows()),
            format!("{} labels", y.len()),
        ));
    }
    if let Some(&bad) = y.iter().find(|&&l| l >= n_classes) {
        return Err(Error::validation(format!(
            "label {bad} outside [0, {n_classes})"
        )));
    }
    Ok(())
}

/// Fits a single CART tree by greedy Gini minimization.
pub fn train_cart(
    x: ArrayView2<'_, f64>,
    y: &[ClassLabel],
    n_classes: usize,
    params: CartParams,
    seed: RngSeed,
) -> Result<DecisionTree> {
    validate_training_input(x, y, n_classes)?;
    if params.max_depth == Some(0) {
        return Err(Error::validation("max_depth must be >= 1"));
    }
    let columns = ColumnMatrix::from_rows(x);
    let mut rng = RngStream::new(seed, "cart", 0);
    let mut samples: Vec<u32> = (0..x.nrows() as u32).collect();
    Ok(fit_on_columns(
        &columns,
        y,
        n_classes,
        params,
        &mut samples,
        &mut rng,
    ))
}

fn fit_on_columns(
    columns: &ColumnMatrix,
    y: &[ClassLabel],
    n_classes: usize,
    params: CartParams,
    samples: &mut [u32],
    rng: &mut RngStream,
) -> DecisionTree {
    let mut builder = TreeBuilder {
        columns,
        y,
        n_classes,
        params,
        pairs: Vec::with_capacity(samples.len()),
        left_counts: vec![0; n_classes],
        pool: Vec::new(),
    };
    let nodes = builder.build(samples, rng);
    DecisionTree {
        nodes,
        n_classes,
        n_features: columns.n_cols(),
    }
}

impl DecisionTree {
    /// Leaf class counts the row routes to.
    pub fn leaf_counts(&self, row: &[f64]) -> &[u32] {
        let mut node = 0;
        loop {
            match &self.nodes[node] {
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row[*feature] < *threshold { *left } else { *right };
                }
                TreeNode::Leaf { class_counts } => return class_counts,
            }
        }
    }

    fn proba_into(&self, row: &[f64], out: &mut [f64]) {
        let counts = self.leaf_counts(row);
        let total: u32 = counts.iter().sum();
        for (o, &c) in out.iter_mut().zip(counts) {
            *o = c as f64 / total as f64;
        }
    }

    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match &nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Internal { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

impl TrainedClassifier for DecisionTree {
    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        check_feature_width(self.n_features, x)?;
        let mut out = Array2::zeros((x.nrows(), self.n_classes));
        for (row, mut slot) in x.outer_iter().zip(out.outer_iter_mut()) {
            self.proba_into(
                row.as_slice().expect("row-major layout"),
                slot.as_slice_mut().expect("row-major layout"),
            );
        }
        Ok(out)
    }

    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features_expected(&self) -> usize {
        self.n_features
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForestKind {
    /// Bootstrap samples, best splits over all features.
    Bagging,
    /// Bootstrap samples, best splits over `ceil(sqrt(d))` random features.
    RandomForest,
    /// Full sample (no bootstrap), random thresholds on `ceil(sqrt(d))`
    /// random features.
    ExtraTrees,
}

impl ForestKind {
    pub fn tag(self) -> &'static str {
        match self {
            ForestKind::Bagging => "bagging",
            ForestKind::RandomForest => "random_forest",
            ForestKind::ExtraTrees => "extra_trees",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub max_depth: Option<usize>,
    pub min_leaf_samples: usize,
    /// Candidate features per node; `None` uses the kind's convention
    /// (all for bagging, `ceil(sqrt(d))` otherwise).
    pub candidate_features: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_estimators: 100,
            max_depth: None,
            min_leaf_samples: 1,
            candidate_features: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ForestModel {
    pub trees: Vec<DecisionTree>,
    pub kind: ForestKind,
    pub params: ForestParams,
    pub seed: RngSeed,
}

fn tree_stream(seed: RngSeed, kind: ForestKind, tree_index: usize) -> RngStream {
    RngStream::new(seed, kind.tag(), tree_index as u64)
}

fn draw_root_samples(kind: ForestKind, n: usize, stream: &mut RngStream) -> Vec<u32> {
    match kind {
        // bootstrap: n draws with replacement from the tree's own stream
        ForestKind::Bagging | ForestKind::RandomForest => {
            (0..n).map(|_| stream.below(n) as u32).collect()
        }
        // no bootstrap: every sample reaches the root exactly once
        ForestKind::ExtraTrees => (0..n as u32).collect(),
    }
}

/// The exact multiset of sample indices tree `tree_index` trains on.
/// This is the instrumentation hook for the no-bootstrap guarantee.
pub fn root_sample_indices(
    kind: ForestKind,
    n: usize,
    seed: RngSeed,
    tree_index: usize,
) -> Vec<u32> {
    let mut stream = tree_stream(seed, kind, tree_index);
    draw_root_samples(kind, n, &mut stream)
}

/// Fits an ensemble of CART trees. Trees are independent and fit in
/// parallel; tree `i` draws only from the stream `(seed, kind, i)`, so
/// results do not depend on worker count.
pub fn train_forest(
    x: ArrayView2<'_, f64>,
    y: &[ClassLabel],
    n_classes: usize,
    kind: ForestKind,
    params: ForestParams,
    seed: RngSeed,
) -> Result<ForestModel> {
    validate_training_input(x, y, n_classes)?;
    if params.n_estimators == 0 {
        return Err(Error::validation("n_estimators must be >= 1"));
    }
    let n = x.nrows();
    let d = x.ncols();
    let sqrt_d = (d as f64).sqrt().ceil() as usize;
    let candidate_features = match (kind, params.candidate_features) {
        (_, Some(k)) => CandidateFeatures::Count(k.min(d)),
        (ForestKind::Bagging, None) => CandidateFeatures::All,
        (_, None) => CandidateFeatures::Count(sqrt_d),
    };
    let splitter = match kind {
        ForestKind::ExtraTrees => Splitter::Random,
        _ => Splitter::Best,
    };
    let cart = CartParams {
        max_depth: params.max_depth,
        min_leaf_samples: params.min_leaf_samples,
        candidate_features,
        splitter,
    };
    let columns = ColumnMatrix::from_rows(x);
    let trees: Vec<DecisionTree> = (0..params.n_estimators)
        .into_par_iter()
        .map(|i| {
            let mut stream = tree_stream(seed, kind, i);
            let mut samples = draw_root_samples(kind, n, &mut stream);
            fit_on_columns(&columns, y, n_classes, cart, &mut samples, &mut stream)
        })
        .collect();
    Ok(ForestModel {
        trees,
        kind,
        params,
        seed,
    })
}

impl TrainedClassifier for ForestModel {
    /// Average of the per-tree leaf class-frequency distributions.
    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let n_features = self.trees[0].n_features;
        check_feature_width(n_features, x)?;
        let n_classes = self.n_classes();
        let rows: Vec<Vec<f64>> = (0..x.nrows())
            .into_par_iter()
            .map(|i| {
                let row = x.row(i);
                let row = row.as_slice().expect("row-major layout");
                let mut acc = vec![0.0; n_classes];
                let mut one = vec![0.0; n_classes];
                for tree in &self.trees {
                    tree.proba_into(row, &mut one);
                    for (a, &p) in acc.iter_mut().zip(&one) {
                        *a += p;
                    }
                }
                let inv = 1.0 / self.trees.len() as f64;
                for a in acc.iter_mut() {
                    *a *= inv;
                }
                acc
            })
            .collect();
        let mut out = Array2::zeros((x.nrows(), n_classes));
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                out[[i, j]] = v;
            }
        }
        Ok(out)
    }

    fn n_classes(&self) -> usize {
        self.trees[0].n_classes
    }

    fn n_features_expected(&self) -> usize {
        self.trees[0].n_features
    }
}
