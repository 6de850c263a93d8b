//! Plane trees counted by hyper-Catalan numbers.
//!
//! A subdigon of type `m` corresponds to an ordered tree whose internal nodes
//! have arity 2..=5: a node with `k` children is a `(k+1)`-gon face, its
//! children are the subdigons hanging off the non-roof edges, and a leaf is a
//! bare edge. Counting these trees by recursive decomposition gives
//! `C[m]` without any factorials.
//!
//! Text form: a leaf is `.`, an arity-`k` node is `(k c1 ... ck)` with the
//! children separated by single spaces. A lone triangle is `(2 . .)`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::typevec::{Shape, TypeVector};

/// Refusal threshold for [`enumerate_count`].
pub const DEFAULT_BUDGET: u64 = 10_000_000;
/// Largest tree list [`enumerate_trees`] will materialize.
pub const TREE_LIMIT: u64 = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumError {
    #[error("{m} has {count} trees, over the budget of {budget}")]
    BudgetExceeded {
        m: TypeVector,
        count: BigUint,
        budget: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlaneTree {
    Leaf,
    Node(Vec<PlaneTree>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("node arity {0} outside 2..=5")]
    Arity(usize),
    #[error("malformed tree text at byte {0}")]
    Syntax(usize),
}

impl PlaneTree {
    pub fn node(children: Vec<PlaneTree>) -> Result<Self, TreeError> {
        if !(2..=5).contains(&children.len()) {
            return Err(TreeError::Arity(children.len()));
        }
        Ok(PlaneTree::Node(children))
    }

    /// Count of arity-`k` nodes for each `k`.
    pub fn type_vector(&self) -> TypeVector {
        let mut m = [0u32; 4];
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if let PlaneTree::Node(children) = t {
                m[children.len() - 2] += 1;
                stack.extend(children);
            }
        }
        TypeVector(m)
    }
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaneTree::Leaf => f.write_str("."),
            PlaneTree::Node(children) => {
                write!(f, "({}", children.len())?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for PlaneTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        fn parse(b: &[u8], pos: &mut usize) -> Result<PlaneTree, TreeError> {
            match b.get(*pos) {
                Some(b'.') => {
                    *pos += 1;
                    Ok(PlaneTree::Leaf)
                }
                Some(b'(') => {
                    let arity = match b.get(*pos + 1) {
                        Some(&d @ b'2'..=b'5') => usize::from(d - b'0'),
                        Some(d) if d.is_ascii_digit() => {
                            return Err(TreeError::Arity(usize::from(d - b'0')))
                        }
                        _ => return Err(TreeError::Syntax(*pos + 1)),
                    };
                    *pos += 2;
                    let mut children = Vec::with_capacity(arity);
                    for _ in 0..arity {
                        if b.get(*pos) != Some(&b' ') {
                            return Err(TreeError::Syntax(*pos));
                        }
                        *pos += 1;
                        children.push(parse(b, pos)?);
                    }
                    if b.get(*pos) != Some(&b')') {
                        return Err(TreeError::Syntax(*pos));
                    }
                    *pos += 1;
                    Ok(PlaneTree::Node(children))
                }
                _ => Err(TreeError::Syntax(*pos)),
            }
        }
        let bytes = s.as_bytes();
        let mut pos = 0;
        let tree = parse(bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(TreeError::Syntax(pos));
        }
        Ok(tree)
    }
}

/// Dense table over every type vector componentwise `<= bound`.
struct SubTypes {
    radix: [usize; 4],
}

impl SubTypes {
    fn new(bound: TypeVector) -> Self {
        let radix = bound.0.map(|x| x as usize + 1);
        SubTypes { radix }
    }

    fn len(&self) -> usize {
        self.radix.iter().product()
    }

    fn index(&self, m: TypeVector) -> usize {
        m.0.iter()
            .zip(&self.radix)
            .fold(0, |acc, (&x, &r)| acc * r + x as usize)
    }

    fn vector(&self, mut idx: usize) -> TypeVector {
        let mut out = [0u32; 4];
        for i in (0..4).rev() {
            out[i] = (idx % self.radix[i]) as u32;
            idx /= self.radix[i];
        }
        TypeVector(out)
    }

    /// All `x <= b` componentwise, in lexicographic order.
    fn below(&self, b: TypeVector) -> impl Iterator<Item = TypeVector> {
        let [p, q, r, s] = b.0;
        (0..=p).flat_map(move |a| {
            (0..=q).flat_map(move |bb| {
                (0..=r).flat_map(move |c| (0..=s).map(move |d| TypeVector::new(a, bb, c, d)))
            })
        })
    }
}

fn minus(a: TypeVector, b: TypeVector) -> TypeVector {
    TypeVector(std::array::from_fn(|i| a.0[i] - b.0[i]))
}

/// Tree counts for every sub-type of a bound.
///
/// `trees[a]` counts trees of type `a`; `forests[j-1][a]` counts ordered
/// `j`-tuples of trees whose types sum to `a`.
struct CountTable {
    types: SubTypes,
    trees: Vec<BigUint>,
    forests: [Vec<BigUint>; 5],
}

impl CountTable {
    fn build(bound: TypeVector) -> Self {
        let types = SubTypes::new(bound);
        let len = types.len();
        let mut trees = vec![BigUint::zero(); len];
        let mut forests: [Vec<BigUint>; 5] = std::array::from_fn(|_| vec![BigUint::zero(); len]);
        // Row-major order visits every componentwise-smaller type first.
        for idx in 0..len {
            let b = types.vector(idx);
            let mut count = if b.is_zero() {
                BigUint::one()
            } else {
                BigUint::zero()
            };
            for shape in Shape::ALL {
                if let Some(rest) = b.decremented(shape) {
                    count += &forests[shape.index() - 1][types.index(rest)];
                }
            }
            trees[idx] = count.clone();
            forests[0][idx] = count;
            for j in 1..5 {
                let mut total = BigUint::zero();
                for x in types.below(b) {
                    let head = &trees[types.index(x)];
                    if head.is_zero() {
                        continue;
                    }
                    total += head * &forests[j - 1][types.index(minus(b, x))];
                }
                forests[j][idx] = total;
            }
        }
        CountTable {
            types,
            trees,
            forests,
        }
    }

    fn trees(&self, m: TypeVector) -> &BigUint {
        &self.trees[self.types.index(m)]
    }
}

/// Number of plane trees of type `m`, refusing when it exceeds `budget`.
pub fn enumerate_count(m: TypeVector, budget: u64) -> Result<BigUint, EnumError> {
    let table = CountTable::build(m);
    let count = table.trees(m).clone();
    check_budget(m, count, budget)
}

fn check_budget(m: TypeVector, count: BigUint, budget: u64) -> Result<BigUint, EnumError> {
    if count.to_u64().is_some_and(|c| c <= budget) {
        Ok(count)
    } else {
        Err(EnumError::BudgetExceeded { m, count, budget })
    }
}

/// Every plane tree of type `m`, in canonical order: leaf first, then by root
/// arity, then by the children's types in lexicographic order, then by the
/// children themselves.
pub fn enumerate_trees(m: TypeVector) -> Result<Vec<PlaneTree>, EnumError> {
    let table = CountTable::build(m);
    check_budget(m, table.trees(m).clone(), TREE_LIMIT)?;
    let mut builder = TreeBuilder {
        table: &table,
        memo: HashMap::new(),
    };
    Ok(builder.trees(m))
}

struct TreeBuilder<'a> {
    table: &'a CountTable,
    memo: HashMap<TypeVector, Vec<PlaneTree>>,
}

impl TreeBuilder<'_> {
    fn trees(&mut self, m: TypeVector) -> Vec<PlaneTree> {
        if let Some(v) = self.memo.get(&m) {
            return v.clone();
        }
        let mut out = Vec::new();
        if m.is_zero() {
            out.push(PlaneTree::Leaf);
        }
        for shape in Shape::ALL {
            let Some(rest) = m.decremented(shape) else {
                continue;
            };
            let arity = shape.index();
            let mut parts = Vec::with_capacity(arity);
            self.split(rest, arity, &mut parts, &mut out);
        }
        self.memo.insert(m, out.clone());
        out
    }

    /// Extends `parts` with every ordered split of `rest` into `slots` more
    /// child types, emitting the trees for each complete split.
    fn split(
        &mut self,
        rest: TypeVector,
        slots: usize,
        parts: &mut Vec<TypeVector>,
        out: &mut Vec<PlaneTree>,
    ) {
        if slots == 1 {
            if self.table.trees(rest).is_zero() {
                return;
            }
            parts.push(rest);
            let choices: Vec<Vec<PlaneTree>> = parts.iter().map(|&p| self.trees(p)).collect();
            product(&choices, &mut Vec::new(), out);
            parts.pop();
            return;
        }
        let heads: Vec<TypeVector> = self.table.types.below(rest).collect();
        for head in heads {
            if self.table.trees(head).is_zero() {
                continue;
            }
            let tail = minus(rest, head);
            if self.table.forests[slots - 2][self.table.types.index(tail)].is_zero() {
                continue;
            }
            parts.push(head);
            self.split(tail, slots - 1, parts, out);
            parts.pop();
        }
    }
}

fn product(choices: &[Vec<PlaneTree>], current: &mut Vec<PlaneTree>, out: &mut Vec<PlaneTree>) {
    match choices.split_first() {
        None => out.push(PlaneTree::Node(current.clone())),
        Some((first, rest)) => {
            for t in first {
                current.push(t.clone());
                product(rest, current, out);
                current.pop();
            }
        }
    }
}
