//! Hierarchical softmax over a Huffman tree.
//!
//! A word's probability is the product of sigmoid branch decisions along
//! its root-to-leaf path: code bit 0 takes the `sigmoid(x)` branch, bit 1
//! takes `sigmoid(-x)`. Frequent words get short paths, so both lookup
//! and the gradient step are `O(code length * d)`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Sigmoid inputs are clamped to this magnitude before exponentiation.
pub const SIGMOID_CLAMP: f64 = 30.0;

/// Logistic function with the input clamped to `[-SIGMOID_CLAMP, SIGMOID_CLAMP]`.
pub fn sigmoid<F: Float>(x: F) -> F {
    let bound = F::from(SIGMOID_CLAMP).unwrap();
    let x = x.max(-bound).min(bound);
    F::one() / (F::one() + (-x).exp())
}

/// Per-word binary codes and internal-node paths of a Huffman tree built
/// over vocabulary frequencies. Internal nodes are numbered densely
/// `0..V-1` in creation order; the root is node `V-2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HuffmanTree {
    codes: Vec<Vec<u8>>,
    paths: Vec<Vec<u32>>,
    internal_count: usize,
}

impl HuffmanTree {
    /// Build the tree by repeatedly merging the two lowest-count nodes.
    /// Count ties are broken by lower node id, so construction is
    /// deterministic for a given count vector.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let v = counts.len();
        if v < 2 {
            return Err(Error::DegenerateVocabulary { size: v });
        }

        // Node ids: leaves 0..v, internal nodes v..2v-1 in creation order.
        let total = 2 * v - 1;
        let mut parent = vec![0usize; total];
        let mut bit = vec![0u8; total];

        let mut heap: BinaryHeap<Reverse<(u64, usize)>> = counts
            .iter()
            .enumerate()
            .map(|(id, &c)| Reverse((c, id)))
            .collect();

        for step in 0..v - 1 {
            let Reverse((c0, n0)) = heap.pop().expect("heap underflow");
            let Reverse((c1, n1)) = heap.pop().expect("heap underflow");
            let merged = v + step;
            parent[n0] = merged;
            bit[n0] = 0;
            parent[n1] = merged;
            bit[n1] = 1;
            heap.push(Reverse((c0 + c1, merged)));
        }

        let root = total - 1;
        let mut codes = Vec::with_capacity(v);
        let mut paths = Vec::with_capacity(v);
        for leaf in 0..v {
            let mut code = Vec::new();
            let mut path = Vec::new();
            let mut node = leaf;
            while node != root {
                code.push(bit[node]);
                path.push((parent[node] - v) as u32);
                node = parent[node];
            }
            code.reverse();
            path.reverse();
            codes.push(code);
            paths.push(path);
        }

        Ok(HuffmanTree {
            codes,
            paths,
            internal_count: v - 1,
        })
    }

    /// Rebuild from serialized codes and paths.
    pub fn from_parts(codes: Vec<Vec<u8>>, paths: Vec<Vec<u32>>, internal_count: usize) -> Self {
        HuffmanTree {
            codes,
            paths,
            internal_count,
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.codes.len()
    }

    pub fn internal_count(&self) -> usize {
        self.internal_count
    }

    pub fn code(&self, word: usize) -> &[u8] {
        &self.codes[word]
    }

    pub fn path(&self, word: usize) -> &[u32] {
        &self.paths[word]
    }

    /// Sum of `count[w] * len(code[w])`, the quantity Huffman minimizes.
    pub fn weighted_code_length(&self, counts: &[u64]) -> u64 {
        self.codes
            .iter()
            .zip(counts)
            .map(|(code, &c)| code.len() as u64 * c)
            .sum()
    }
}

fn check_shapes<F: Float>(
    word: usize,
    input: &[F],
    params: &Matrix<F>,
    tree: &HuffmanTree,
) -> Result<()> {
    if word >= tree.vocab_size() {
        return Err(Error::DocOutOfRange {
            id: word,
            len: tree.vocab_size(),
        });
    }
    if input.len() != params.cols() {
        return Err(Error::Shape {
            expected: params.cols(),
            actual: input.len(),
        });
    }
    if params.rows() != tree.internal_count() {
        return Err(Error::Shape {
            expected: tree.internal_count(),
            actual: params.rows(),
        });
    }
    Ok(())
}

fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Probability of `word` given an input vector: the product over the
/// word's path of `sigmoid(+/- <input, node>)`, sign chosen by the code bit.
pub fn probability<F: Float>(
    word: usize,
    input: &[F],
    params: &Matrix<F>,
    tree: &HuffmanTree,
) -> Result<F> {
    check_shapes(word, input, params, tree)?;
    let mut p = F::one();
    for (&bit, &node) in tree.code(word).iter().zip(tree.path(word)) {
        let x = dot(input, params.row(node as usize));
        let s = if bit == 0 { sigmoid(x) } else { sigmoid(-x) };
        p = p * s;
    }
    Ok(p)
}

/// Negative log probability of `word` plus its exact gradients: with
/// respect to the input vector, and to each node parameter vector on the
/// word's path (nodes off the path have zero gradient and are omitted).
#[allow(clippy::type_complexity)]
pub fn loss_grad<F: Float>(
    word: usize,
    input: &[F],
    params: &Matrix<F>,
    tree: &HuffmanTree,
) -> Result<(F, Vec<F>, Vec<(usize, Vec<F>)>)> {
    check_shapes(word, input, params, tree)?;
    let mut loss = F::zero();
    let mut grad_input = vec![F::zero(); input.len()];
    let mut grad_nodes = Vec::with_capacity(tree.code(word).len());

    for (&bit, &node) in tree.code(word).iter().zip(tree.path(word)) {
        let row = params.row(node as usize);
        let x = dot(input, row);
        let s = sigmoid(x);
        // target activation: bit 0 wants sigmoid(x) -> 1, bit 1 wants 0
        let t = if bit == 0 { F::one() } else { F::zero() };
        let branch = if bit == 0 { s } else { F::one() - s };
        loss = loss - branch.ln();
        // d(-ln branch)/dx = s - t, for either bit
        let err = s - t;
        for (gi, &ri) in grad_input.iter_mut().zip(row) {
            *gi = *gi + err * ri;
        }
        let grad_node: Vec<F> = input.iter().map(|&xi| err * xi).collect();
        grad_nodes.push((node as usize, grad_node));
    }

    Ok((loss, grad_input, grad_nodes))
}
