//! CART trees with Gini splits, bagged into a random forest.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSubsample {
    Sqrt,
    Log2,
}

impl FeatureSubsample {
    /// Candidate features per split, at least one.
    pub fn candidates(self, n_features: usize) -> usize {
        let n = n_features as f64;
        let k = match self {
            FeatureSubsample::Sqrt => n.sqrt().ceil(),
            FeatureSubsample::Log2 => n.log2().ceil(),
        };
        (k as usize).clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub feature_subsample: FeatureSubsample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        negatives: u32,
        positives: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    fn leaf(&self, x: &[f64]) -> (u32, u32) {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
                Node::Leaf {
                    negatives,
                    positives,
                } => return (negatives, positives),
            }
        }
    }

    /// Majority class of the reached leaf; ties vote against the victim.
    pub fn votes_positive(&self, x: &[f64]) -> bool {
        let (neg, pos) = self.leaf(x);
        pos > neg
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
                Node::Leaf { .. } => 0,
            }
        }
        go(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub params: ForestParams,
    pub n_features: usize,
    pub trees: Vec<Tree>,
}

impl Forest {
    /// Fraction of trees voting for the victim.
    pub fn score(&self, x: &[f64]) -> f64 {
        let votes = self.trees.iter().filter(|t| t.votes_positive(x)).count();
        votes as f64 / self.trees.len() as f64
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.score(x) > 0.5
    }
}

fn gini(neg: usize, pos: usize) -> f64 {
    let n = (neg + pos) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = pos as f64 / n;
    2.0 * p * (1.0 - p)
}

/// Best threshold on one feature: `(weighted child impurity, threshold)`,
/// where the weight is the child size. Thresholds are midpoints between
/// consecutive distinct values; the lowest wins ties.
pub fn best_split_on_feature(x: &[Vec<f64>], y: &[bool], idx: &[usize], feature: usize) -> Option<(f64, f64)> {
    let mut order: Vec<usize> = idx.to_vec();
    order.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]));
    let total_pos = order.iter().filter(|&&i| y[i]).count();
    let total_neg = order.len() - total_pos;
    let (mut lneg, mut lpos) = (0usize, 0usize);
    let mut best: Option<(f64, f64)> = None;
    for w in 0..order.len().saturating_sub(1) {
        if y[order[w]] {
            lpos += 1;
        } else {
            lneg += 1;
        }
        let (a, b) = (x[order[w]][feature], x[order[w + 1]][feature]);
        if a == b {
            continue;
        }
        let (rneg, rpos) = (total_neg - lneg, total_pos - lpos);
        let impurity = (lneg + lpos) as f64 * gini(lneg, lpos) + (rneg + rpos) as f64 * gini(rneg, rpos);
        let mut threshold = a + (b - a) / 2.0;
        if threshold >= b {
            threshold = a;
        }
        if best.map_or(true, |(bi, _)| impurity < bi) {
            best = Some((impurity, threshold));
        }
    }
    best
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [bool],
    max_depth: usize,
    candidates: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn grow(&mut self, idx: &[usize], depth: usize) -> usize {
        let pos = idx.iter().filter(|&&i| self.y[i]).count();
        let neg = idx.len() - pos;
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            negatives: neg as u32,
            positives: pos as u32,
        });
        if depth >= self.max_depth || pos == 0 || neg == 0 {
            return id;
        }
        let n_features = self.x[0].len();
        let features = sample(&mut self.rng, n_features, self.candidates.min(n_features));
        let mut best: Option<(f64, usize, f64)> = None;
        for f in features.iter() {
            if let Some((imp, thr)) = best_split_on_feature(self.x, self.y, idx, f) {
                if best.map_or(true, |(bi, _, _)| imp < bi) {
                    best = Some((imp, f, thr));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
        let left = self.grow(&l, depth + 1);
        let right = self.grow(&r, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

/// Fits one tree on the rows in `idx` (duplicates allowed).
pub fn train_tree(
    x: &[Vec<f64>],
    y: &[bool],
    idx: &[usize],
    max_depth: usize,
    candidates: usize,
    rng: ChaCha8Rng,
) -> Tree {
    let mut b = Builder {
        x,
        y,
        max_depth,
        candidates,
        rng,
        nodes: Vec::new(),
    };
    b.grow(idx, 0);
    Tree { nodes: b.nodes }
}

/// Bagged CART forest. Tree `t` draws its bootstrap sample and split
/// candidates from the sub-seed `(seed, "tree", t)`.
pub fn train_forest(x: &[Vec<f64>], y: &[bool], params: &ForestParams, seed: u64) -> Result<Forest> {
    if x.len() != y.len() {
        return Err(Error::validation("feature rows and labels differ in length"));
    }
    if !(y.iter().any(|&v| v) && y.iter().any(|&v| !v)) {
        return Err(Error::Training("forest needs both classes".into()));
    }
    if params.n_estimators == 0 {
        return Err(Error::validation("forest needs at least one tree"));
    }
    let n = x.len();
    let n_features = x[0].len();
    let candidates = params.feature_subsample.candidates(n_features);
    let trees = (0..params.n_estimators)
        .map(|t| {
            let mut rng = seed::rng(seed, labels!["tree", t]);
            let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            train_tree(x, y, &idx, params.max_depth, candidates, rng)
        })
        .collect();
    Ok(Forest {
        params: *params,
        n_features,
        trees,
    })
}
