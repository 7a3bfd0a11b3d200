//! Coxeter-system combinatorics: canonical words, Bruhat order,
//! subexpressions with Deodhar decorations, rex graphs and the Hecke product.
//!
//! Elements are represented by their lexicographically minimal reduced word.
//! The word problem is solved combinatorially: the reduced words of an element
//! form one class under braid moves, and `xs < x` exactly when some reduced
//! word of `x` ends in `s`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use parking_lot::RwLock;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;

/// Index of a simple reflection in the declared generator order.
pub type Gen = u8;

/// An entry of the Coxeter matrix; `None` stands for ∞.
pub type Order = Option<u32>;

/// A group element, stored as its canonical (lex-minimal reduced) word.
///
/// Elements are ordered by length first, then lexicographically; this is a
/// linear extension of the Bruhat order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Element {
    word: Vec<Gen>,
}

impl Element {
    pub fn identity() -> Self {
        Element { word: Vec::new() }
    }
    pub fn canonical_word(&self) -> &[Gen] {
        &self.word
    }
    pub fn length(&self) -> usize {
        self.word.len()
    }
    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.word.len(), &self.word).cmp(&(other.word.len(), &other.word))
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element{:?}", self.word)
    }
}

/// Deodhar decoration of one index of a subexpression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Decoration {
    U0,
    U1,
    D0,
    D1,
}

impl Decoration {
    pub fn is_up(self) -> bool {
        matches!(self, Decoration::U0 | Decoration::U1)
    }
    pub fn defect(self) -> i32 {
        match self {
            Decoration::U0 => 1,
            Decoration::D0 => -1,
            _ => 0,
        }
    }
}

/// A 01-sequence on an expression together with its decorations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subexpression {
    pub bits: Vec<bool>,
    pub decorations: Vec<Decoration>,
    pub defect: i32,
}

impl Subexpression {
    /// Bits packed with index `i` at bit `i`.
    pub fn mask(&self) -> usize {
        self.bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| 1usize << i).sum()
    }

    pub fn all_ones(n: usize) -> Self {
        Subexpression { bits: vec![true; n], decorations: vec![Decoration::U1; n], defect: 0 }
    }
}

impl fmt::Display for Subexpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.bits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", u8::from(*b))?;
        }
        write!(f, ")")
    }
}

/// One braid relation applied to a reduced word.
///
/// `position` is 1-based: the alternating block `s t s …` of length `m_{st}`
/// starting at letter `position` is replaced by `t s t …`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BraidMove {
    pub position: usize,
    pub from: Gen,
    pub to: Gen,
}

#[derive(Clone, Debug)]
pub struct RexGraph {
    pub nodes: Vec<Vec<Gen>>,
    pub edges: Vec<(usize, usize, BraidMove)>,
}

#[derive(Debug)]
struct ElemData {
    rexes: Vec<Vec<Gen>>,
    right_descents: u64,
    left_descents: u64,
}

/// Finite irreducible types recognised from the Coxeter graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentType {
    A(usize),
    B(usize),
    D(usize),
    E(usize),
    F4,
    H(usize),
    I2(u32),
    Infinite,
}

impl ComponentType {
    pub fn order(&self) -> Option<u128> {
        let fact = |n: usize| (1..=n as u128).product::<u128>();
        Some(match self {
            ComponentType::A(n) => fact(n + 1),
            ComponentType::B(n) => (1u128 << n) * fact(*n),
            ComponentType::D(n) => (1u128 << (n - 1)) * fact(*n),
            ComponentType::E(6) => 51840,
            ComponentType::E(7) => 2903040,
            ComponentType::E(8) => 696729600,
            ComponentType::E(_) => return None,
            ComponentType::F4 => 1152,
            ComponentType::H(3) => 120,
            ComponentType::H(4) => 14400,
            ComponentType::H(_) => return None,
            ComponentType::I2(m) => 2 * *m as u128,
            ComponentType::Infinite => return None,
        })
    }
}

impl fmt::Display for ComponentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentType::A(n) => write!(f, "A{n}"),
            ComponentType::B(n) => write!(f, "B{n}"),
            ComponentType::D(n) => write!(f, "D{n}"),
            ComponentType::E(n) => write!(f, "E{n}"),
            ComponentType::F4 => write!(f, "F4"),
            ComponentType::H(n) => write!(f, "H{n}"),
            ComponentType::I2(m) => write!(f, "I2({m})"),
            ComponentType::Infinite => write!(f, "infinite"),
        }
    }
}

/// A Coxeter system with memoized word combinatorics.
pub struct CoxeterSystem {
    labels: Vec<String>,
    matrix: Vec<Vec<Order>>,
    components: Vec<(Vec<Gen>, ComponentType)>,
    finite: bool,
    rex_cap: usize,
    data: RwLock<HashMap<Vec<Gen>, Arc<ElemData>>>,
    products: RwLock<HashMap<(Vec<Gen>, Gen), Element>>,
    bruhat: RwLock<HashMap<(Vec<Gen>, Vec<Gen>), bool>>,
}

impl fmt::Debug for CoxeterSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoxeterSystem")
            .field("labels", &self.labels)
            .field("matrix", &self.matrix)
            .finish()
    }
}

const DEFAULT_REX_CAP: usize = 20000;

impl CoxeterSystem {
    /// Builds a system from labels and a symmetric matrix with unit diagonal.
    pub fn new(labels: Vec<String>, matrix: Vec<Vec<Order>>) -> Result<Self> {
        let n = labels.len();
        let mut problems = Vec::new();
        if n > 64 {
            problems.push("more than 64 generators".to_string());
        }
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            problems.push(format!("Coxeter matrix must be {n}x{n}"));
        } else {
            for i in 0..n {
                if matrix[i][i] != Some(1) {
                    problems.push(format!("m({0},{0}) must be 1", labels[i]));
                }
                for j in 0..n {
                    if i != j {
                        if matrix[i][j] != matrix[j][i] {
                            problems.push(format!("m({},{}) is not symmetric", labels[i], labels[j]));
                        }
                        if let Some(m) = matrix[i][j] {
                            if m < 2 {
                                problems.push(format!("m({},{}) = {m} < 2", labels[i], labels[j]));
                            }
                        }
                    }
                }
            }
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != n {
            problems.push("generator labels must be distinct".to_string());
        }
        if !problems.is_empty() {
            return Err(Error::InvalidRealization(problems));
        }
        let components = classify(&matrix);
        let finite = components.iter().all(|(_, t)| *t != ComponentType::Infinite);
        Ok(CoxeterSystem {
            labels,
            matrix,
            components,
            finite,
            rex_cap: DEFAULT_REX_CAP,
            data: RwLock::new(HashMap::new()),
            products: RwLock::new(HashMap::new()),
            bruhat: RwLock::new(HashMap::new()),
        })
    }

    /// Standard finite types by name: `A1`, `A2`, `A3`, `B2`, `G2`, `A1xA1`,
    /// `I2(m)` (including `I2(inf)`).
    pub fn of_type(name: &str) -> Result<Self> {
        let lab = |k: usize| -> Vec<String> {
            ["s", "t", "u", "r", "q", "p"].iter().take(k).map(|s| s.to_string()).collect()
        };
        let path = |k: usize, edge: &dyn Fn(usize) -> Order| -> Vec<Vec<Order>> {
            let mut m = vec![vec![Some(2); k]; k];
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = Some(1);
            }
            for i in 0..k.saturating_sub(1) {
                m[i][i + 1] = edge(i);
                m[i + 1][i] = edge(i);
            }
            m
        };
        let name = name.trim();
        match name {
            "A1xA1" | "A1×A1" => CoxeterSystem::new(lab(2), path(2, &|_| Some(2))),
            "B2" | "C2" => CoxeterSystem::new(lab(2), path(2, &|_| Some(4))),
            "G2" => CoxeterSystem::new(lab(2), path(2, &|_| Some(6))),
            _ if name.starts_with("I2(") && name.ends_with(')') => {
                let inner = &name[3..name.len() - 1];
                let m = if inner == "inf" || inner == "∞" {
                    None
                } else {
                    Some(inner.parse::<u32>().map_err(|_| Error::Parse(name.to_string()))?)
                };
                CoxeterSystem::new(lab(2), path(2, &|_| m))
            }
            _ if name.starts_with('A') => {
                let k: usize = name[1..].parse().map_err(|_| Error::Parse(name.to_string()))?;
                CoxeterSystem::new(lab(k), path(k, &|_| Some(3)))
            }
            _ if name.starts_with('B') => {
                let k: usize = name[1..].parse().map_err(|_| Error::Parse(name.to_string()))?;
                CoxeterSystem::new(lab(k), path(k, &|i| if i == 0 { Some(4) } else { Some(3) }))
            }
            _ => Err(Error::Parse(format!("unknown Coxeter type {name:?}"))),
        }
    }

    pub fn with_rex_cap(mut self, cap: usize) -> Self {
        self.rex_cap = cap;
        self
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn m(&self, s: Gen, t: Gen) -> Order {
        self.matrix[s as usize][t as usize]
    }
    pub fn matrix(&self) -> &[Vec<Order>] {
        &self.matrix
    }
    pub fn is_finite(&self) -> bool {
        self.finite
    }
    pub fn components(&self) -> &[(Vec<Gen>, ComponentType)] {
        &self.components
    }

    /// Name of the type, e.g. `A2` or `A1xA1`.
    pub fn type_name(&self) -> String {
        self.components.iter().map(|(_, t)| t.to_string()).collect::<Vec<_>>().join("x")
    }

    /// |W| by the product formula, when W is finite.
    pub fn order_formula(&self) -> Option<u128> {
        self.components.iter().map(|(_, t)| t.order()).product()
    }

    /// Stable content hash of the labels and the Coxeter matrix.
    pub fn matrix_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.labels.join(",").as_bytes());
        for row in &self.matrix {
            for m in row {
                h.update(match m {
                    Some(v) => v.to_string(),
                    None => "inf".to_string(),
                });
                h.update(b";");
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn generator(&self, s: Gen) -> Element {
        Element { word: vec![s] }
    }

    pub fn generators(&self) -> impl Iterator<Item = Gen> {
        0..self.rank() as Gen
    }

    /// Label lookup.
    pub fn gen_index(&self, label: &str) -> Option<Gen> {
        self.labels.iter().position(|l| l == label).map(|i| i as Gen)
    }

    /// Parses a word: `""`, `"e"` or `"()"` is empty; single-letter labels may
    /// be concatenated (`"sts"`), otherwise letters are comma separated.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Gen>> {
        let t = text.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if t.is_empty() || (t == "e" && self.gen_index("e").is_none()) {
            return Ok(Vec::new());
        }
        let pieces: Vec<String> = if t.contains(',') || t.contains(' ') {
            t.split(|c| c == ',' || c == ' ').filter(|p| !p.is_empty()).map(str::to_string).collect()
        } else if self.labels.iter().all(|l| l.chars().count() == 1) {
            t.chars().map(|c| c.to_string()).collect()
        } else {
            vec![t.to_string()]
        };
        pieces
            .iter()
            .map(|p| self.gen_index(p).ok_or_else(|| Error::Parse(format!("unknown generator {p:?} in {text:?}"))))
            .collect()
    }

    pub fn word_string(&self, word: &[Gen]) -> String {
        if word.is_empty() {
            return "e".to_string();
        }
        let sep = if self.labels.iter().all(|l| l.chars().count() == 1) { "" } else { "," };
        word.iter().map(|g| self.labels[*g as usize].as_str()).collect::<Vec<_>>().join(sep)
    }

    /// Like [`Self::word_string`] but prints the empty expression as `()`.
    pub fn expr_string(&self, word: &[Gen]) -> String {
        if word.is_empty() {
            "()".to_string()
        } else {
            self.word_string(word)
        }
    }

    pub fn elem_string(&self, w: &Element) -> String {
        self.word_string(&w.word)
    }

    fn braid_neighbours(&self, word: &[Gen]) -> Vec<(BraidMove, Vec<Gen>)> {
        let mut out = Vec::new();
        for p in 0..word.len() {
            let s = word[p];
            if p + 1 >= word.len() {
                break;
            }
            let t = word[p + 1];
            if s == t {
                continue;
            }
            let Some(m) = self.m(s, t) else { continue };
            let m = m as usize;
            if p + m > word.len() {
                continue;
            }
            let alternating = (0..m).all(|i| word[p + i] == if i % 2 == 0 { s } else { t });
            if !alternating {
                continue;
            }
            let mut w = word.to_vec();
            for i in 0..m {
                w[p + i] = if i % 2 == 0 { t } else { s };
            }
            out.push((BraidMove { position: p + 1, from: s, to: t }, w));
        }
        out
    }

    /// All words reachable by braid moves, sorted.
    fn braid_class(&self, word: &[Gen]) -> Result<Vec<Vec<Gen>>> {
        let mut seen: BTreeSet<Vec<Gen>> = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(word.to_vec());
        queue.push_back(word.to_vec());
        while let Some(w) = queue.pop_front() {
            for (_, n) in self.braid_neighbours(&w) {
                if seen.insert(n.clone()) {
                    if seen.len() > self.rex_cap {
                        return Err(Error::InfiniteRexSet { cap: self.rex_cap });
                    }
                    queue.push_back(n);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// Registers the element with the given reduced word and returns it.
    fn register_reduced(&self, word: &[Gen]) -> Result<Element> {
        let class = self.braid_class(word)?;
        let canonical = class[0].clone();
        if self.data.read().contains_key(&canonical) {
            return Ok(Element { word: canonical });
        }
        let mut right = 0u64;
        let mut left = 0u64;
        for w in &class {
            if let Some(&s) = w.last() {
                right |= 1 << s;
            }
            if let Some(&s) = w.first() {
                left |= 1 << s;
            }
        }
        let d = Arc::new(ElemData { rexes: class, right_descents: right, left_descents: left });
        self.data.write().entry(canonical.clone()).or_insert(d);
        Ok(Element { word: canonical })
    }

    fn data_of(&self, w: &Element) -> Arc<ElemData> {
        if let Some(d) = self.data.read().get(&w.word) {
            return d.clone();
        }
        self.register_reduced(&w.word).expect("canonical words are reduced and within the rex cap");
        self.data.read().get(&w.word).expect("just registered").clone()
    }

    /// All reduced words of `w`, sorted lexicographically.
    pub fn reduced_words(&self, w: &Element) -> Result<Vec<Vec<Gen>>> {
        if let Some(d) = self.data.read().get(&w.word) {
            return Ok(d.rexes.clone());
        }
        self.register_reduced(&w.word)?;
        Ok(self.data.read()[&w.word].rexes.clone())
    }

    pub fn has_right_descent(&self, w: &Element, s: Gen) -> bool {
        self.data_of(w).right_descents & (1 << s) != 0
    }

    pub fn has_left_descent(&self, w: &Element, s: Gen) -> bool {
        self.data_of(w).left_descents & (1 << s) != 0
    }

    /// `w·s`.
    pub fn mul_gen(&self, w: &Element, s: Gen) -> Element {
        let key = (w.word.clone(), s);
        if let Some(r) = self.products.read().get(&key) {
            return r.clone();
        }
        let d = self.data_of(w);
        let result = if d.right_descents & (1 << s) != 0 {
            let rex = d.rexes.iter().find(|r| r.last() == Some(&s)).expect("descent witness");
            self.register_reduced(&rex[..rex.len() - 1]).expect("subword of a registered rex")
        } else {
            let mut word = w.word.clone();
            word.push(s);
            self.register_reduced(&word).expect("reduced-word class within the rex cap")
        };
        self.products.write().insert(key, result.clone());
        result
    }

    /// `s·w`.
    pub fn gen_mul(&self, s: Gen, w: &Element) -> Element {
        self.inverse(&self.mul_gen(&self.inverse(w), s))
    }

    /// π(w̲): the product of the letters.
    pub fn element(&self, word: &[Gen]) -> Element {
        word.iter().fold(Element::identity(), |acc, &s| self.mul_gen(&acc, s))
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        b.word.iter().fold(a.clone(), |acc, &s| self.mul_gen(&acc, s))
    }

    pub fn inverse(&self, w: &Element) -> Element {
        let rev: Vec<Gen> = w.word.iter().rev().copied().collect();
        self.register_reduced(&rev).expect("reverse of a reduced word is reduced")
    }

    pub fn is_reduced(&self, word: &[Gen]) -> bool {
        self.element(word).length() == word.len()
    }

    /// Bruhat order via the lifting property.
    pub fn bruhat_leq(&self, x: &Element, y: &Element) -> bool {
        if x.length() > y.length() {
            return false;
        }
        if x.length() == y.length() {
            return x == y;
        }
        if x.is_identity() {
            return true;
        }
        let key = (x.word.clone(), y.word.clone());
        if let Some(&b) = self.bruhat.read().get(&key) {
            return b;
        }
        let s = *y.word.last().expect("nonidentity");
        let ys = self.mul_gen(y, s);
        let xs = self.mul_gen(x, s);
        let ans = if xs.length() < x.length() { self.bruhat_leq(&xs, &ys) } else { self.bruhat_leq(x, &ys) };
        self.bruhat.write().insert(key, ans);
        ans
    }

    pub fn bruhat_lt(&self, x: &Element, y: &Element) -> bool {
        x != y && self.bruhat_leq(x, y)
    }

    /// Enumerates W in shortlex order; fails past `cap` elements.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<Element>> {
        let mut seen: BTreeSet<Element> = BTreeSet::new();
        let mut frontier = vec![Element::identity()];
        seen.insert(Element::identity());
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for w in &frontier {
                for s in self.generators() {
                    let ws = self.mul_gen(w, s);
                    if ws.length() > w.length() && seen.insert(ws.clone()) {
                        if seen.len() > cap {
                            return Err(Error::IntervalTooLarge { cap });
                        }
                        next.push(ws);
                    }
                }
            }
            frontier = next;
        }
        Ok(seen.into_iter().collect())
    }

    /// The interval `[e, w]` in shortlex order.
    pub fn lower_interval(&self, w: &Element, cap: usize) -> Result<Vec<Element>> {
        let mut seen: BTreeSet<Element> = BTreeSet::new();
        let mut stack = vec![w.clone()];
        seen.insert(w.clone());
        while let Some(x) = stack.pop() {
            for i in 0..x.length() {
                let mut word = x.word.clone();
                word.remove(i);
                let y = self.element(&word);
                if y.length() + 1 == x.length() && seen.insert(y.clone()) {
                    if seen.len() > cap {
                        return Err(Error::IntervalTooLarge { cap });
                    }
                    stack.push(y);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// The longest element of a finite W.
    pub fn longest_element(&self) -> Result<Element> {
        if !self.finite {
            return Err(Error::Precondition("W is infinite".into()));
        }
        let mut w = Element::identity();
        loop {
            match self.generators().find(|&s| !self.has_right_descent(&w, s)) {
                Some(s) => w = self.mul_gen(&w, s),
                None => return Ok(w),
            }
        }
    }

    /// M(w̲, x) with decorations and defects, in lexicographic order of bits.
    pub fn subexpressions(&self, word: &[Gen], x: &Element) -> Vec<Subexpression> {
        let mut out = Vec::new();
        let mut bits = Vec::with_capacity(word.len());
        let mut decs = Vec::with_capacity(word.len());
        self.subexpr_rec(word, x, Element::identity(), &mut bits, &mut decs, 0, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn subexpr_rec(
        &self,
        word: &[Gen],
        x: &Element,
        cur: Element,
        bits: &mut Vec<bool>,
        decs: &mut Vec<Decoration>,
        defect: i32,
        out: &mut Vec<Subexpression>,
    ) {
        let i = bits.len();
        if i == word.len() {
            if &cur == x {
                out.push(Subexpression { bits: bits.clone(), decorations: decs.clone(), defect });
            }
            return;
        }
        let remaining = word.len() - i;
        if cur.length().abs_diff(x.length()) > remaining {
            return;
        }
        let s = word[i];
        let up = !self.has_right_descent(&cur, s);
        for bit in [false, true] {
            let dec = match (up, bit) {
                (true, false) => Decoration::U0,
                (true, true) => Decoration::U1,
                (false, false) => Decoration::D0,
                (false, true) => Decoration::D1,
            };
            let next = if bit { self.mul_gen(&cur, s) } else { cur.clone() };
            bits.push(bit);
            decs.push(dec);
            self.subexpr_rec(word, x, next, bits, decs, defect + dec.defect(), out);
            bits.pop();
            decs.pop();
        }
    }

    /// `Σ_{e ∈ M(w̲, x)} v^{d(e)}`.
    pub fn defect_generating_function(&self, word: &[Gen], x: &Element) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for e in self.subexpressions(word, x) {
            p.add_term(e.defect, 1);
        }
        p
    }

    /// All subexpressions of `word`, grouped by the element they express.
    pub fn all_subexpressions(&self, word: &[Gen]) -> BTreeMap<Element, Vec<Subexpression>> {
        let mut out: BTreeMap<Element, Vec<Subexpression>> = BTreeMap::new();
        for mask in 0..(1usize << word.len()) {
            let bits: Vec<bool> = (0..word.len()).map(|i| mask >> i & 1 == 1).collect();
            let sub = self.decorate(word, &bits);
            let x = self.element(&(0..word.len()).filter(|&i| bits[i]).map(|i| word[i]).collect::<Vec<_>>());
            out.entry(x).or_default().push(sub);
        }
        for v in out.values_mut() {
            v.sort_by(|a, b| a.bits.cmp(&b.bits));
        }
        out
    }

    /// Decorates an arbitrary 01-sequence on `word`.
    pub fn decorate(&self, word: &[Gen], bits: &[bool]) -> Subexpression {
        assert_eq!(word.len(), bits.len());
        let mut cur = Element::identity();
        let mut decs = Vec::with_capacity(word.len());
        let mut defect = 0;
        for (i, &s) in word.iter().enumerate() {
            let up = !self.has_right_descent(&cur, s);
            let dec = match (up, bits[i]) {
                (true, false) => Decoration::U0,
                (true, true) => Decoration::U1,
                (false, false) => Decoration::D0,
                (false, true) => Decoration::D1,
            };
            defect += dec.defect();
            decs.push(dec);
            if bits[i] {
                cur = self.mul_gen(&cur, s);
            }
        }
        Subexpression { bits: bits.to_vec(), decorations: decs, defect }
    }

    /// The rex graph of `w`; edges are recorded once, from the smaller node.
    pub fn rex_graph(&self, w: &Element) -> Result<RexGraph> {
        let nodes = self.reduced_words(w)?;
        let index: HashMap<&Vec<Gen>, usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let mut edges = Vec::new();
        for (i, n) in nodes.iter().enumerate() {
            for (mv, nb) in self.braid_neighbours(n) {
                let j = index[&nb];
                if i < j {
                    edges.push((i, j, mv));
                }
            }
        }
        Ok(RexGraph { nodes, edges })
    }

    /// A shortest sequence of braid moves from `a` to `b`; among shortest
    /// paths the lexicographically smallest label sequence is returned.
    pub fn rex_path(&self, a: &[Gen], b: &[Gen]) -> Result<Vec<BraidMove>> {
        if !self.is_reduced(a) {
            return Err(Error::NotReduced(self.expr_string(a)));
        }
        if !self.is_reduced(b) {
            return Err(Error::NotReduced(self.expr_string(b)));
        }
        if self.element(a) != self.element(b) {
            return Err(Error::NotSameElement);
        }
        let mut parent: HashMap<Vec<Gen>, (Vec<Gen>, BraidMove)> = HashMap::new();
        let mut queue = VecDeque::new();
        let start = a.to_vec();
        let mut seen: BTreeSet<Vec<Gen>> = BTreeSet::new();
        seen.insert(start.clone());
        queue.push_back(start.clone());
        while let Some(w) = queue.pop_front() {
            if w == b {
                break;
            }
            let mut nbs = self.braid_neighbours(&w);
            nbs.sort_by(|x, y| x.0.cmp(&y.0));
            for (mv, n) in nbs {
                if seen.insert(n.clone()) {
                    if seen.len() > self.rex_cap {
                        return Err(Error::InfiniteRexSet { cap: self.rex_cap });
                    }
                    parent.insert(n.clone(), (w.clone(), mv));
                    queue.push_back(n);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = b.to_vec();
        while cur != start {
            let (p, mv) = parent.get(&cur).expect("rex graph is connected").clone();
            path.push(mv);
            cur = p;
        }
        path.reverse();
        Ok(path)
    }

    /// Applies a braid move to a word.
    pub fn apply_braid(&self, word: &[Gen], mv: BraidMove) -> Vec<Gen> {
        let m = self.m(mv.from, mv.to).expect("finite braid") as usize;
        let p = mv.position - 1;
        let mut w = word.to_vec();
        for i in 0..m {
            debug_assert_eq!(word[p + i], if i % 2 == 0 { mv.from } else { mv.to });
            w[p + i] = if i % 2 == 0 { mv.to } else { mv.from };
        }
        w
    }

    /// Demazure (Hecke) product of the letters.
    pub fn hecke_star(&self, word: &[Gen]) -> Element {
        word.iter().fold(Element::identity(), |acc, &s| {
            if self.has_right_descent(&acc, s) {
                acc
            } else {
                self.mul_gen(&acc, s)
            }
        })
    }

    /// The lex-minimal reduced word of `w` ending in `s` (requires `ws < w`).
    pub fn word_ending_in(&self, w: &Element, s: Gen) -> Vec<Gen> {
        let mut word = self.mul_gen(w, s).word;
        word.push(s);
        word
    }
}

fn classify(matrix: &[Vec<Order>]) -> Vec<(Vec<Gen>, ComponentType)> {
    let n = matrix.len();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![start];
        comp[start] = id;
        let mut k = 0;
        while k < members.len() {
            let i = members[k];
            for j in 0..n {
                if j != i && matrix[i][j] != Some(2) && comp[j] == usize::MAX {
                    comp[j] = id;
                    members.push(j);
                }
            }
            k += 1;
        }
        members.sort();
        let ty = classify_component(matrix, &members);
        out.push((members.iter().map(|&i| i as Gen).collect(), ty));
    }
    out
}

fn classify_component(matrix: &[Vec<Order>], members: &[usize]) -> ComponentType {
    let k = members.len();
    if k == 1 {
        return ComponentType::A(1);
    }
    let mut edges = Vec::new();
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            match matrix[i][j] {
                Some(2) => {}
                Some(m) => edges.push((i, j, m)),
                None => return ComponentType::Infinite,
            }
        }
    }
    if k == 2 {
        return match edges[0].2 {
            3 => ComponentType::A(2),
            4 => ComponentType::B(2),
            m => ComponentType::I2(m),
        };
    }
    if edges.len() != k - 1 {
        return ComponentType::Infinite;
    }
    let mut degree: HashMap<usize, usize> = HashMap::new();
    for &(i, j, _) in &edges {
        *degree.entry(i).or_default() += 1;
        *degree.entry(j).or_default() += 1;
    }
    let heavy: Vec<&(usize, usize, u32)> = edges.iter().filter(|e| e.2 > 3).collect();
    let max_deg = degree.values().copied().max().unwrap_or(0);
    let is_leaf = |v: usize| degree.get(&v).copied().unwrap_or(0) == 1;
    if max_deg <= 2 {
        match heavy.as_slice() {
            [] => ComponentType::A(k),
            [&(i, j, 4)] if is_leaf(i) || is_leaf(j) => ComponentType::B(k),
            [&(_, _, 4)] if k == 4 => ComponentType::F4,
            [&(i, j, 5)] if (is_leaf(i) || is_leaf(j)) && (k == 3 || k == 4) => ComponentType::H(k),
            _ => ComponentType::Infinite,
        }
    } else if max_deg == 3 && heavy.is_empty() && degree.values().filter(|&&d| d == 3).count() == 1 {
        let centre = *degree.iter().find(|(_, &d)| d == 3).expect("branch node").0;
        let mut arms = Vec::new();
        for &(i, j, _) in edges.iter().filter(|e| e.0 == centre || e.1 == centre) {
            let mut prev = centre;
            let mut cur = if i == centre { j } else { i };
            let mut len = 1;
            loop {
                let next = edges.iter().find_map(|&(a, b, _)| {
                    if a == cur && b != prev {
                        Some(b)
                    } else if b == cur && a != prev {
                        Some(a)
                    } else {
                        None
                    }
                });
                match next {
                    Some(nx) => {
                        prev = cur;
                        cur = nx;
                        len += 1;
                    }
                    None => break,
                }
            }
            arms.push(len);
        }
        arms.sort();
        match arms.as_slice() {
            [1, 1, _] => ComponentType::D(k),
            [1, 2, 2] => ComponentType::E(6),
            [1, 2, 3] => ComponentType::E(7),
            [1, 2, 4] => ComponentType::E(8),
            _ => ComponentType::Infinite,
        }
    } else {
        ComponentType::Infinite
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> CoxeterSystem {
        CoxeterSystem::of_type("A2").unwrap()
    }

    #[test]
    fn multiplication_examples() {
        let w = a2();
        let s = w.element(&[0]);
        assert!(w.multiply(&s, &s).is_identity());
        let sts = w.element(&[0, 1, 0]);
        assert_eq!(w.multiply(&sts, &Element::identity()), sts);
        let st = w.element(&[0, 1]);
        let ts = w.element(&[1, 0]);
        let t = w.element(&[1]);
        let p = w.multiply(&st, &s);
        assert_eq!(p.canonical_word(), &[0, 1, 0]);
        assert_eq!(p, w.multiply(&ts, &t));
        assert_eq!(w.element(&[1, 0, 1]), sts);
    }

    #[test]
    fn bruhat_examples() {
        let w = a2();
        let st = w.element(&[0, 1]);
        let ts = w.element(&[1, 0]);
        let sts = w.element(&[0, 1, 0]);
        assert!(w.bruhat_leq(&Element::identity(), &sts));
        assert!(w.bruhat_leq(&st, &sts));
        assert!(!w.bruhat_leq(&st, &ts));
    }

    #[test]
    fn subexpression_examples() {
        let w = a2();
        let s = w.element(&[0]);
        let subs = w.subexpressions(&[0, 1, 0], &s);
        let bits: Vec<Vec<bool>> = subs.iter().map(|x| x.bits.clone()).collect();
        assert_eq!(bits, vec![vec![false, false, true], vec![true, false, false]]);
        let dot = w.subexpressions(&[0], &Element::identity());
        assert_eq!(dot.len(), 1);
        assert_eq!(dot[0].decorations, vec![Decoration::U0]);
        assert_eq!(dot[0].defect, 1);
        let empty = w.subexpressions(&[], &Element::identity());
        assert_eq!(empty.len(), 1);
        assert_eq!(empty[0].defect, 0);
    }

    #[test]
    fn rex_graph_examples() {
        let w = a2();
        let g = w.rex_graph(&w.element(&[0, 1, 0])).unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.edges.len(), 1);
        let g1 = w.rex_graph(&w.element(&[0])).unwrap();
        assert_eq!((g1.nodes.len(), g1.edges.len()), (1, 0));
        let b2 = CoxeterSystem::of_type("B2").unwrap();
        let w0 = b2.longest_element().unwrap();
        let g2 = b2.rex_graph(&w0).unwrap();
        assert_eq!(g2.nodes, vec![vec![0, 1, 0, 1], vec![1, 0, 1, 0]]);
        assert_eq!(g2.edges.len(), 1);
    }

    #[test]
    fn rex_path_examples() {
        let w = a2();
        let p = w.rex_path(&[0, 1, 0], &[1, 0, 1]).unwrap();
        assert_eq!(p, vec![BraidMove { position: 1, from: 0, to: 1 }]);
        assert!(w.rex_path(&[0, 1, 0], &[0, 1, 0]).unwrap().is_empty());
        assert!(matches!(w.rex_path(&[0, 0], &[0, 0]), Err(Error::NotReduced(_))));
        assert!(matches!(w.rex_path(&[0, 1], &[1, 0]), Err(Error::NotSameElement)));
    }

    #[test]
    fn hecke_star_examples() {
        let w = a2();
        assert_eq!(w.hecke_star(&[0, 1, 0, 0]), w.element(&[0, 1, 0]));
        assert_eq!(w.hecke_star(&[0, 0]), w.element(&[0]));
    }

    #[test]
    fn classification_and_orders() {
        for (name, order) in [("A1", 2), ("A2", 6), ("A3", 24), ("B2", 8), ("B3", 48), ("G2", 12), ("A1xA1", 4)] {
            let w = CoxeterSystem::of_type(name).unwrap();
            assert!(w.is_finite(), "{name}");
            assert_eq!(w.order_formula(), Some(order), "{name}");
            assert_eq!(w.enumerate(1000).unwrap().len() as u128, order, "{name}");
        }
        let inf = CoxeterSystem::of_type("I2(inf)").unwrap();
        assert!(!inf.is_finite());
        let affine = CoxeterSystem::new(
            vec!["s".into(), "t".into(), "u".into()],
            vec![vec![Some(1), Some(3), Some(3)], vec![Some(3), Some(1), Some(3)], vec![Some(3), Some(3), Some(1)]],
        )
        .unwrap();
        assert!(!affine.is_finite());
        assert_eq!(affine.element(&[0, 1, 2, 0, 1, 2]).length(), 6);
    }

    #[test]
    fn invalid_matrices_rejected() {
        let bad = CoxeterSystem::new(vec!["s".into(), "t".into()], vec![vec![Some(1), Some(3)], vec![Some(4), Some(1)]]);
        assert!(bad.is_err());
        let bad2 = CoxeterSystem::new(vec!["s".into(), "t".into()], vec![vec![Some(1), Some(1)], vec![Some(1), Some(1)]]);
        assert!(bad2.is_err());
    }
}
