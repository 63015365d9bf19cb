//! Variable tables: the base coordinates `(p, q, t)` of the Darboux model and
//! the optional fiber blocks `xi`, `eta`, `Y` that mirror them.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A base coordinate of `R^{2n+1}`. Indices are 1-based, as in `p1 .. pn`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    P(usize),
    Q(usize),
    T,
}

impl Coord {
    /// Position inside a block of `2n + 1` variables.
    pub fn offset(self, n: usize) -> usize {
        match self {
            Coord::P(i) => i - 1,
            Coord::Q(i) => n + i - 1,
            Coord::T => 2 * n,
        }
    }

    pub fn from_offset(offset: usize, n: usize) -> Coord {
        if offset < n {
            Coord::P(offset + 1)
        } else if offset < 2 * n {
            Coord::Q(offset - n + 1)
        } else {
            Coord::T
        }
    }

    pub fn name(self) -> String {
        match self {
            Coord::P(i) => format!("p{i}"),
            Coord::Q(i) => format!("q{i}"),
            Coord::T => "t".to_string(),
        }
    }

    pub fn is_spatial(self) -> bool {
        !matches!(self, Coord::T)
    }
}

/// Fiber blocks. `Xi` and `Eta` are cotangent (covector) variables, `Y` is a
/// tangent (vector) variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Block {
    #[serde(rename = "xi")]
    Xi,
    #[serde(rename = "eta")]
    Eta,
    #[serde(rename = "Y")]
    Y,
}

impl Block {
    pub const ALL: [Block; 3] = [Block::Xi, Block::Eta, Block::Y];

    pub fn prefix(self) -> &'static str {
        match self {
            Block::Xi => "xi",
            Block::Eta => "eta",
            Block::Y => "Y",
        }
    }

    pub fn parse(s: &str) -> Result<Block> {
        match s {
            "xi" => Ok(Block::Xi),
            "eta" => Ok(Block::Eta),
            "Y" => Ok(Block::Y),
            other => Err(Error::Parse(format!("unknown fiber block `{other}`"))),
        }
    }
}

/// Index of a variable inside a [`VarTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub usize);

/// Ordered variable list: the base block (`2n+1` variables) followed by each
/// enabled fiber block in the order `xi`, `eta`, `Y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarTable {
    n: usize,
    blocks: Vec<Block>,
}

impl VarTable {
    pub fn new(n: usize, blocks: &[Block]) -> Result<Arc<VarTable>> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let mut blocks = blocks.to_vec();
        blocks.sort();
        blocks.dedup();
        Ok(Arc::new(VarTable { n, blocks }))
    }

    pub fn base(n: usize) -> Arc<VarTable> {
        VarTable::new(n, &[]).expect("n >= 1")
    }

    /// Base block plus `xi`: the table of the modules `R^k_delta`.
    pub fn with_xi(n: usize) -> Arc<VarTable> {
        VarTable::new(n, &[Block::Xi]).expect("n >= 1")
    }

    /// All three fiber blocks: the table of `S^{km}_{l;nu}`.
    pub fn full(n: usize) -> Arc<VarTable> {
        VarTable::new(n, &Block::ALL).expect("n >= 1")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn has_block(&self, b: Block) -> bool {
        self.blocks.contains(&b)
    }

    /// Size of one block, `2n + 1`.
    pub fn block_len(&self) -> usize {
        2 * self.n + 1
    }

    pub fn len(&self) -> usize {
        self.block_len() * (1 + self.blocks.len())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, c: Coord) -> Var {
        Var(c.offset(self.n))
    }

    pub fn p(&self, i: usize) -> Var {
        self.coord(Coord::P(i))
    }

    pub fn q(&self, i: usize) -> Var {
        self.coord(Coord::Q(i))
    }

    pub fn t(&self) -> Var {
        self.coord(Coord::T)
    }

    pub fn fiber(&self, b: Block, c: Coord) -> Option<Var> {
        let pos = self.blocks.iter().position(|&x| x == b)?;
        Some(Var((pos + 1) * self.block_len() + c.offset(self.n)))
    }

    /// Like [`VarTable::fiber`] but panics when the block is disabled.
    pub fn fv(&self, b: Block, c: Coord) -> Var {
        self.fiber(b, c)
            .unwrap_or_else(|| panic!("block {} is not enabled", b.prefix()))
    }

    /// All base coordinates in table order.
    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.block_len()).map(move |o| Coord::from_offset(o, self.n))
    }

    /// `None` for base variables.
    pub fn block_of(&self, v: Var) -> Option<Block> {
        let slot = v.0 / self.block_len();
        if slot == 0 {
            None
        } else {
            Some(self.blocks[slot - 1])
        }
    }

    pub fn coord_of(&self, v: Var) -> Coord {
        Coord::from_offset(v.0 % self.block_len(), self.n)
    }

    pub fn is_base(&self, v: Var) -> bool {
        v.0 < self.block_len()
    }

    pub fn name(&self, v: Var) -> String {
        let c = self.coord_of(v).name();
        match self.block_of(v) {
            None => c,
            Some(b) => format!("{}_{}", b.prefix(), c),
        }
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.name(Var(i))).collect()
    }

    pub fn lookup(&self, name: &str) -> Result<Var> {
        (0..self.len())
            .map(Var)
            .find(|&v| self.name(v) == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Variables of one fiber block, in coordinate order.
    pub fn block_vars(&self, b: Block) -> Vec<Var> {
        self.coords().filter_map(|c| self.fiber(b, c)).collect()
    }

    /// Maps every variable of `self` to the same-named variable of `other`.
    pub fn embedding_into(&self, other: &VarTable) -> Result<Vec<usize>> {
        if self.n != other.n {
            return Err(Error::TableMismatch(self.to_string(), other.to_string()));
        }
        (0..self.len())
            .map(|i| {
                let v = Var(i);
                let c = self.coord_of(v);
                match self.block_of(v) {
                    None => Ok(other.coord(c).0),
                    Some(b) => other
                        .fiber(b, c)
                        .map(|w| w.0)
                        .ok_or_else(|| Error::TableMismatch(self.to_string(), other.to_string())),
                }
            })
            .collect()
    }
}

impl fmt::Display for VarTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} [base", self.n)?;
        for b in &self.blocks {
            write!(f, ", {}", b.prefix())?;
        }
        write!(f, "]")
    }
}

/// Two tables are compatible when they describe the same variable list.
pub fn same_table(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_names() {
        let t = VarTable::new(2, &[Block::Y, Block::Xi]).unwrap();
        assert_eq!(t.len(), 15);
        assert_eq!(t.blocks(), &[Block::Xi, Block::Y]);
        assert_eq!(
            t.names()[..5],
            ["p1", "p2", "q1", "q2", "t"].map(String::from)
        );
        assert_eq!(t.name(t.fv(Block::Xi, Coord::T)), "xi_t");
        assert_eq!(t.name(t.fv(Block::Y, Coord::Q(2))), "Y_q2");
        assert!(t.fiber(Block::Eta, Coord::T).is_none());
        assert_eq!(t.lookup("Y_p1").unwrap(), t.fv(Block::Y, Coord::P(1)));
        assert!(t.lookup("eta_t").is_err());
    }

    #[test]
    fn names_are_unique() {
        let t = VarTable::full(3);
        let mut names = t.names();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), t.len());
    }

    #[test]
    fn block_membership() {
        let t = VarTable::full(1);
        let v = t.fv(Block::Eta, Coord::P(1));
        assert_eq!(t.block_of(v), Some(Block::Eta));
        assert_eq!(t.coord_of(v), Coord::P(1));
        assert!(t.is_base(t.t()));
        assert_eq!(t.block_of(t.q(1)), None);
    }

    #[test]
    fn embedding_requires_blocks() {
        let small = VarTable::with_xi(1);
        let big = VarTable::full(1);
        let e = small.embedding_into(&big).unwrap();
        assert_eq!(e[3], big.fv(Block::Xi, Coord::P(1)).0);
        assert!(big.embedding_into(&small).is_err());
        assert!(small.embedding_into(&VarTable::with_xi(2)).is_err());
    }
}
