use super::Graph;
use crate::error::{Error, Result};

/// How two vertices of one factor relate to each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Equal,
    Adjacent,
    Other,
}

impl Relation {
    const ALL: [Relation; 3] = [Relation::Equal, Relation::Adjacent, Relation::Other];

    fn index(self) -> usize {
        match self {
            Relation::Equal => 0,
            Relation::Adjacent => 1,
            Relation::Other => 2,
        }
    }
}

/// One of the 256 graph products: a truth table over the eight relation
/// pairs other than `(Equal, Equal)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProductRule {
    table: [bool; 8],
}

impl ProductRule {
    fn slot(rg: Relation, rh: Relation) -> Option<usize> {
        let k = rg.index() * 3 + rh.index();
        (k > 0).then(|| k - 1)
    }

    pub fn from_table(table: [bool; 8]) -> Self {
        ProductRule { table }
    }

    /// Bit `k` of `bits` is entry `k` of the table, ordered as
    /// `(E,A) (E,O) (A,E) (A,A) (A,O) (O,E) (O,A) (O,O)`.
    pub fn from_bits(bits: u8) -> Self {
        let mut table = [false; 8];
        for (k, t) in table.iter_mut().enumerate() {
            *t = bits >> k & 1 == 1;
        }
        ProductRule { table }
    }

    pub fn bits(&self) -> u8 {
        self.table.iter().enumerate().fold(0, |acc, (k, &t)| acc | (u8::from(t) << k))
    }

    pub fn from_pairs(pairs: &[(Relation, Relation)]) -> Result<Self> {
        let mut table = [false; 8];
        for &(rg, rh) in pairs {
            let k = Self::slot(rg, rh).ok_or_else(|| Error::InvalidParameter("(Equal, Equal) is not a product slot".into()))?;
            table[k] = true;
        }
        Ok(ProductRule { table })
    }

    pub fn fires(&self, rg: Relation, rh: Relation) -> bool {
        Self::slot(rg, rh).is_some_and(|k| self.table[k])
    }

    pub fn table(&self) -> [bool; 8] {
        self.table
    }

    pub fn cartesian() -> Self {
        Self::from_pairs(&[(Relation::Adjacent, Relation::Equal), (Relation::Equal, Relation::Adjacent)]).unwrap()
    }

    pub fn tensor() -> Self {
        Self::from_pairs(&[(Relation::Adjacent, Relation::Adjacent)]).unwrap()
    }

    pub fn strong() -> Self {
        Self::from_bits(Self::cartesian().bits() | Self::tensor().bits())
    }

    /// `(g, h) ~ (g', h')` iff `g ~ g'`, or `g = g'` and `h ~ h'`.
    pub fn lexicographic() -> Self {
        let mut pairs: Vec<_> = Relation::ALL.iter().map(|&rh| (Relation::Adjacent, rh)).collect();
        pairs.push((Relation::Equal, Relation::Adjacent));
        Self::from_pairs(&pairs).unwrap()
    }

    pub fn all() -> impl Iterator<Item = ProductRule> {
        (0..=255u8).map(Self::from_bits)
    }
}

fn relation_matrix(g: &Graph) -> Vec<Vec<Relation>> {
    let n = g.vertex_count();
    let mut rel = vec![vec![Relation::Other; n]; n];
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = Relation::Equal;
    }
    for (u, v, _) in g.edges() {
        rel[u][v] = Relation::Adjacent;
        rel[v][u] = Relation::Adjacent;
    }
    rel
}

/// Product graph on `V(G) x V(H)`; vertex `(g, h)` has index `g * |V(H)| + h`.
pub fn product_graph(g: &Graph, h: &Graph, rule: ProductRule) -> Result<Graph> {
    for (name, f) in [("first", g), ("second", h)] {
        if !f.is_simple() {
            return Err(Error::NotSimple(format!("{name} factor has loops or multi-edges")));
        }
        if f.is_weighted() {
            return Err(Error::NotSimple(format!("{name} factor is weighted")));
        }
    }
    let (rg, rh) = (relation_matrix(g), relation_matrix(h));
    let (ng, nh) = (g.vertex_count(), h.vertex_count());
    let n = ng * nh;
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rule.fires(rg[a / nh][b / nh], rh[a % nh][b % nh]) {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges(n, &edges)
}
