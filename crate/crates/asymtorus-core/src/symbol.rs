//! Formal symbol calculus for the square of the asymmetric Dirac operator.
//!
//! Elements are finite sums of *words*.  A word alternates commuting blocks
//! k^a·b0^c (k is the positive conformal factor, b0 the resolvent-type symbol
//! (1 + ξ₁² + k²ξ₂²)⁻¹, and the two commute) with noncommuting *letters*,
//! each letter a first- or second-order derivative of k.  Words also carry
//! exponents of the momentum variables ξ₁, ξ₂ and a flag for the chiral spin
//! factor.  Everything is exact over Gaussian rationals.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::scalar::{fmt_rational, Gauss};
use crate::torus::Dir;

/// Errors from the symbol engine.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolError {
    /// A third derivative of k was requested; only first and second
    /// derivatives are representable.
    UnsupportedOrder,
    /// Malformed textual word list.
    Parse(String),
    /// A coefficient left the real/imaginary-rational representation.
    NotRepresentable(String),
}

impl fmt::Display for SymbolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolError::UnsupportedOrder => {
                write!(f, "third and higher derivatives of k are not representable")
            }
            SymbolError::Parse(m) => write!(f, "word parse error: {}", m),
            SymbolError::NotRepresentable(m) => write!(f, "not representable: {}", m),
        }
    }
}

// ---------------------------------------------------------------------------
// Letters and blocks
// ---------------------------------------------------------------------------

/// A derivative of k appearing as a noncommuting factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    D1,
    D2,
    D11,
    D12,
    D22,
}

impl Letter {
    /// Applies one more derivation to this letter.
    pub fn derive(self, dir: Dir) -> Result<Letter, SymbolError> {
        match (self, dir) {
            (Letter::D1, Dir::One) => Ok(Letter::D11),
            (Letter::D1, Dir::Two) => Ok(Letter::D12),
            (Letter::D2, Dir::One) => Ok(Letter::D12),
            (Letter::D2, Dir::Two) => Ok(Letter::D22),
            _ => Err(SymbolError::UnsupportedOrder),
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Letter::D1 => "d1k",
            Letter::D2 => "d2k",
            Letter::D11 => "d11k",
            Letter::D12 => "d12k",
            Letter::D22 => "d22k",
        }
    }

    pub fn from_token(t: &str) -> Option<Letter> {
        match t {
            "d1k" => Some(Letter::D1),
            "d2k" => Some(Letter::D2),
            "d11k" => Some(Letter::D11),
            "d12k" => Some(Letter::D12),
            "d22k" => Some(Letter::D22),
            _ => None,
        }
    }

    /// Total derivative order (1 or 2).
    pub fn order(self) -> u8 {
        match self {
            Letter::D1 | Letter::D2 => 1,
            _ => 2,
        }
    }
}

/// A commuting block k^k_pow · b0^b0_pow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Block {
    pub k_pow: u32,
    pub b0_pow: u32,
}

impl Block {
    pub fn new(k_pow: u32, b0_pow: u32) -> Block {
        Block { k_pow, b0_pow }
    }

    pub fn is_trivial(self) -> bool {
        self.k_pow == 0 && self.b0_pow == 0
    }

    fn merge(self, o: Block) -> Block {
        Block {
            k_pow: self.k_pow + o.k_pow,
            b0_pow: self.b0_pow + o.b0_pow,
        }
    }
}

// ---------------------------------------------------------------------------
// Words
// ---------------------------------------------------------------------------

/// One noncommutative monomial: head block, then (letter, block) pairs, with
/// momentum exponents and a chiral spin flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    pub head: Block,
    pub tail: Vec<(Letter, Block)>,
    pub xi1: u32,
    pub xi2: u32,
    pub chiral: bool,
}

impl Word {
    pub fn unit() -> Word {
        Word {
            head: Block::default(),
            tail: vec![],
            xi1: 0,
            xi2: 0,
            chiral: false,
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.tail.iter().map(|(l, _)| *l)
    }

    /// Total b0 power across all blocks.
    pub fn b0_total(&self) -> u32 {
        self.head.b0_pow + self.tail.iter().map(|(_, b)| b.b0_pow).sum::<u32>()
    }

    /// Total k power across all blocks (letters not counted).
    pub fn k_total(&self) -> u32 {
        self.head.k_pow + self.tail.iter().map(|(_, b)| b.k_pow).sum::<u32>()
    }

    /// Symbol order: momentum degree minus twice the total b0 power.
    pub fn order(&self) -> i64 {
        self.xi1 as i64 + self.xi2 as i64 - 2 * self.b0_total() as i64
    }

    fn chain(&self) -> (Vec<Block>, Vec<Letter>) {
        let mut blocks = Vec::with_capacity(self.tail.len() + 1);
        let mut letters = Vec::with_capacity(self.tail.len());
        blocks.push(self.head);
        for (l, b) in &self.tail {
            letters.push(*l);
            blocks.push(*b);
        }
        (blocks, letters)
    }

    fn from_chain(
        blocks: Vec<Block>,
        letters: Vec<Letter>,
        xi1: u32,
        xi2: u32,
        chiral: bool,
    ) -> Word {
        debug_assert_eq!(blocks.len(), letters.len() + 1);
        let mut it = blocks.into_iter();
        let head = it.next().expect("chain has a head block");
        let tail = letters.into_iter().zip(it).collect();
        Word {
            head,
            tail,
            xi1,
            xi2,
            chiral,
        }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters()
            .cmp(other.letters())
            .then_with(|| (self.xi1, self.xi2).cmp(&(other.xi1, other.xi2)))
            .then_with(|| self.chiral.cmp(&other.chiral))
            .then_with(|| self.head.cmp(&other.head))
            .then_with(|| {
                self.tail
                    .iter()
                    .map(|(_, b)| b)
                    .cmp(other.tail.iter().map(|(_, b)| b))
            })
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// ---------------------------------------------------------------------------
// Symbol expressions
// ---------------------------------------------------------------------------

/// A finite sum of words with Gaussian-rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolExpr {
    pub words: BTreeMap<Word, Gauss>,
}

impl SymbolExpr {
    pub fn zero() -> Self {
        SymbolExpr {
            words: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        SymbolExpr::from_word(Word::unit(), Gauss::one())
    }

    /// The bare resolvent-type symbol b0.
    pub fn b0() -> Self {
        let mut w = Word::unit();
        w.head = Block::new(0, 1);
        SymbolExpr::from_word(w, Gauss::one())
    }

    pub fn from_word(w: Word, c: Gauss) -> Self {
        let mut e = SymbolExpr::zero();
        e.insert_add(w, c);
        e
    }

    pub fn insert_add(&mut self, w: Word, c: Gauss) {
        if c.is_zero() {
            return;
        }
        match self.words.remove(&w) {
            None => {
                self.words.insert(w, c);
            }
            Some(prev) => {
                let s = prev + c;
                if !s.is_zero() {
                    self.words.insert(w, s);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn add(&self, o: &SymbolExpr) -> SymbolExpr {
        let mut out = self.clone();
        for (w, c) in &o.words {
            out.insert_add(w.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> SymbolExpr {
        SymbolExpr {
            words: self
                .words
                .iter()
                .map(|(w, c)| (w.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, o: &SymbolExpr) -> SymbolExpr {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Gauss) -> SymbolExpr {
        if c.is_zero() {
            return SymbolExpr::zero();
        }
        SymbolExpr {
            words: self
                .words
                .iter()
                .map(|(w, x)| (w.clone(), x.clone() * c.clone()))
                .collect(),
        }
    }

    /// Noncommutative product.  Chiral factors square to −1.
    pub fn mul(&self, o: &SymbolExpr) -> SymbolExpr {
        let mut out = SymbolExpr::zero();
        for (w1, c1) in &self.words {
            for (w2, c2) in &o.words {
                let mut coeff = c1.clone() * c2.clone();
                let chiral = w1.chiral ^ w2.chiral;
                if w1.chiral && w2.chiral {
                    coeff = -coeff;
                }
                let (mut blocks, mut letters) = w1.chain();
                let (b2, l2) = w2.chain();
                let junction = blocks.pop().expect("chain head").merge(b2[0]);
                blocks.push(junction);
                blocks.extend_from_slice(&b2[1..]);
                letters.extend_from_slice(&l2);
                let w = Word::from_chain(
                    blocks,
                    letters,
                    w1.xi1 + w2.xi1,
                    w1.xi2 + w2.xi2,
                    chiral,
                );
                out.insert_add(w, coeff);
            }
        }
        out
    }

    /// Applies the torus derivation δ₁ or δ₂ by the Leibniz rule.
    pub fn delta(&self, dir: Dir) -> Result<SymbolExpr, SymbolError> {
        let base = match dir {
            Dir::One => Letter::D1,
            Dir::Two => Letter::D2,
        };
        let mut out = SymbolExpr::zero();
        for (w, c) in &self.words {
            let (blocks, letters) = w.chain();
            // Derivative hits a letter.
            for i in 0..letters.len() {
                let mut ls = letters.clone();
                ls[i] = ls[i].derive(dir)?;
                out.insert_add(
                    Word::from_chain(blocks.clone(), ls, w.xi1, w.xi2, w.chiral),
                    c.clone(),
                );
            }
            // Derivative hits a block k^a b0^c.
            for i in 0..blocks.len() {
                let Block { k_pow: a, b0_pow: cc } = blocks[i];
                // δ(k^a) = Σ_r k^r δ(k) k^(a−1−r), with b0^c staying right.
                for r in 0..a {
                    let mut bs = blocks.clone();
                    let mut ls = letters.clone();
                    bs[i] = Block::new(r, 0);
                    bs.insert(i + 1, Block::new(a - 1 - r, cc));
                    ls.insert(i, base);
                    out.insert_add(
                        Word::from_chain(bs, ls, w.xi1, w.xi2, w.chiral),
                        c.clone(),
                    );
                }
                // δ(b0^c) = −Σ_r b0^(r+1) (δ(k)·k + k·δ(k)) ξ₂² b0^(c−r).
                for r in 0..cc {
                    for (left, right) in [
                        (Block::new(a, r + 1), Block::new(1, cc - r)),
                        (Block::new(a + 1, r + 1), Block::new(0, cc - r)),
                    ] {
                        let mut bs = blocks.clone();
                        let mut ls = letters.clone();
                        bs[i] = left;
                        bs.insert(i + 1, right);
                        ls.insert(i, base);
                        out.insert_add(
                            Word::from_chain(bs, ls, w.xi1, w.xi2 + 2, w.chiral),
                            -c.clone(),
                        );
                    }
                }
            }
        }
        Ok(out)
    }

    /// Applies ∂/∂ξ₁ or ∂/∂ξ₂.
    pub fn xi_deriv(&self, dir: Dir) -> SymbolExpr {
        let mut out = SymbolExpr::zero();
        for (w, c) in &self.words {
            // Derivative of the explicit momentum power.
            let e = match dir {
                Dir::One => w.xi1,
                Dir::Two => w.xi2,
            };
            if e > 0 {
                let mut w2 = w.clone();
                match dir {
                    Dir::One => w2.xi1 -= 1,
                    Dir::Two => w2.xi2 -= 1,
                }
                out.insert_add(w2, c.clone().scale_int(e as i64));
            }
            // Derivative of each b0 power:
            // ∂ᵢ(b0^c) = −2c ξᵢ (k² if i = 2) b0^(c+1).
            let (blocks, letters) = w.chain();
            for i in 0..blocks.len() {
                let cc = blocks[i].b0_pow;
                if cc == 0 {
                    continue;
                }
                let mut bs = blocks.clone();
                bs[i].b0_pow += 1;
                let (mut xi1, mut xi2) = (w.xi1, w.xi2);
                match dir {
                    Dir::One => xi1 += 1,
                    Dir::Two => {
                        xi2 += 1;
                        bs[i].k_pow += 2;
                    }
                }
                out.insert_add(
                    Word::from_chain(bs, letters.clone(), xi1, xi2, w.chiral),
                    c.clone().scale_int(-2 * cc as i64),
                );
            }
        }
        out
    }

    /// Iterated momentum derivative ∂₁^a1 ∂₂^a2.
    pub fn xi_deriv_multi(&self, a1: u32, a2: u32) -> SymbolExpr {
        let mut e = self.clone();
        for _ in 0..a1 {
            e = e.xi_deriv(Dir::One);
        }
        for _ in 0..a2 {
            e = e.xi_deriv(Dir::Two);
        }
        e
    }

    /// Iterated derivation δ₁^a1 δ₂^a2.
    pub fn delta_multi(&self, a1: u32, a2: u32) -> Result<SymbolExpr, SymbolError> {
        let mut e = self.clone();
        for _ in 0..a1 {
            e = e.delta(Dir::One)?;
        }
        for _ in 0..a2 {
            e = e.delta(Dir::Two)?;
        }
        Ok(e)
    }

    /// Keeps only words even in both momentum variables.
    pub fn even_part(&self) -> SymbolExpr {
        SymbolExpr {
            words: self
                .words
                .iter()
                .filter(|(w, _)| w.xi1 % 2 == 0 && w.xi2 % 2 == 0)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Normalized spin trace: keeps the spin-scalar words, drops chiral ones.
    pub fn spin_plain_part(&self) -> SymbolExpr {
        SymbolExpr {
            words: self
                .words
                .iter()
                .filter(|(w, _)| !w.chiral)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Normalized spin trace against the grading operator: chiral words
    /// survive with a factor i, spin-scalar words drop.
    pub fn spin_chiral_part(&self) -> SymbolExpr {
        let i = Gauss::i();
        let mut out = SymbolExpr::zero();
        for (w, c) in &self.words {
            if w.chiral {
                let mut w2 = w.clone();
                w2.chiral = false;
                out.insert_add(w2, c.clone() * i.clone());
            }
        }
        out
    }

    /// Sets k = 1: every word containing a derivative letter vanishes, and
    /// surviving blocks lose their k powers.
    pub fn substitute_k_one(&self) -> SymbolExpr {
        let mut out = SymbolExpr::zero();
        for (w, c) in &self.words {
            if !w.tail.is_empty() {
                continue;
            }
            let mut w2 = w.clone();
            w2.head.k_pow = 0;
            out.insert_add(w2, c.clone());
        }
        out
    }

    pub fn min_order(&self) -> Option<i64> {
        self.words.keys().map(|w| w.order()).min()
    }

    pub fn max_order(&self) -> Option<i64> {
        self.words.keys().map(|w| w.order()).max()
    }

    // -- text form ----------------------------------------------------------

    /// One line per word, in canonical map order.
    pub fn to_lines(&self) -> Vec<String> {
        self.words
            .iter()
            .map(|(w, c)| word_line(c, w))
            .collect()
    }

    /// Parses the line format produced by `to_lines` (and used by the golden
    /// word lists).  `#` starts a comment; blank lines are skipped.
    pub fn parse(text: &str) -> Result<SymbolExpr, SymbolError> {
        let mut out = SymbolExpr::zero();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.split_once('#') {
                Some((before, _)) => before,
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (w, c) = parse_word_line(line)
                .map_err(|m| SymbolError::Parse(format!("line {}: {}", lineno + 1, m)))?;
            out.insert_add(w, c);
        }
        Ok(out)
    }

    /// JSON value listing each word with its coefficient.
    pub fn to_json(&self) -> Result<serde_json::Value, SymbolError> {
        use serde_json::{json, Value};
        let mut words = Vec::new();
        for (w, c) in &self.words {
            let (num, den, ipow) = if c.is_real() {
                (c.re.numer().clone(), c.re.denom().clone(), 0u8)
            } else if c.is_imaginary() {
                (c.im.numer().clone(), c.im.denom().clone(), 1u8)
            } else {
                return Err(SymbolError::NotRepresentable(format!(
                    "mixed coefficient {}",
                    c
                )));
            };
            let blocks: Vec<Value> = core::iter::once(&w.head)
                .chain(w.tail.iter().map(|(_, b)| b))
                .map(|b| json!([b.k_pow, b.b0_pow]))
                .collect();
            let letters: Vec<Value> = w
                .letters()
                .map(|l| Value::String(l.token().to_string()))
                .collect();
            words.push(json!({
                "coeff": {"num": num.to_string(), "den": den.to_string(), "ipow": ipow},
                "spin": if w.chiral { "chiral" } else { "scalar" },
                "xi": [w.xi1, w.xi2],
                "blocks": blocks,
                "letters": letters,
            }));
        }
        Ok(serde_json::Value::Array(words))
    }
}

impl fmt::Display for SymbolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, line) in self.to_lines().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", line)?;
        }
        Ok(())
    }
}

fn push_block_tokens(out: &mut String, b: Block) {
    if b.k_pow == 1 {
        out.push_str(" k");
    } else if b.k_pow > 1 {
        out.push_str(&format!(" k^{}", b.k_pow));
    }
    if b.b0_pow == 1 {
        out.push_str(" b0");
    } else if b.b0_pow > 1 {
        out.push_str(&format!(" b0^{}", b.b0_pow));
    }
}

fn word_line(c: &Gauss, w: &Word) -> String {
    let mut s = String::new();
    if c.is_real() {
        s.push_str(&fmt_rational(&c.re));
    } else if c.is_imaginary() {
        s.push_str(&fmt_rational(&c.im));
        s.push_str(" i");
    } else {
        s.push_str(&format!("({})", c));
    }
    if w.chiral {
        s.push_str(" g");
    }
    push_block_tokens(&mut s, w.head);
    for (l, b) in &w.tail {
        s.push(' ');
        s.push_str(l.token());
        push_block_tokens(&mut s, *b);
    }
    if w.xi1 == 1 {
        s.push_str(" x1");
    } else if w.xi1 > 1 {
        s.push_str(&format!(" x1^{}", w.xi1));
    }
    if w.xi2 == 1 {
        s.push_str(" x2");
    } else if w.xi2 > 1 {
        s.push_str(&format!(" x2^{}", w.xi2));
    }
    s
}

fn parse_word_line(line: &str) -> Result<(Word, Gauss), String> {
    let mut tokens = line.split_whitespace();
    let coeff_tok = tokens.next().ok_or("empty word line")?;
    let rat = crate::torus::rational_from_str(coeff_tok)
        .map_err(|_| format!("bad coefficient `{}`", coeff_tok))?;
    let mut coeff = Gauss::from_rational(rat);
    let mut blocks = vec![Block::default()];
    let mut letters: Vec<Letter> = vec![];
    let (mut xi1, mut xi2) = (0u32, 0u32);
    let mut chiral = false;
    let parse_pow = |tok: &str, base: &str| -> Result<u32, String> {
        let rest = &tok[base.len()..];
        if rest.is_empty() {
            return Ok(1);
        }
        let digits = rest
            .strip_prefix('^')
            .ok_or_else(|| format!("bad token `{}`", tok))?;
        digits
            .parse::<u32>()
            .map_err(|_| format!("bad exponent in `{}`", tok))
    };
    for tok in tokens {
        if tok == "i" {
            coeff = coeff * Gauss::i();
        } else if tok == "g" {
            chiral = true;
        } else if let Some(l) = Letter::from_token(tok) {
            letters.push(l);
            blocks.push(Block::default());
        } else if tok.starts_with("b0") {
            blocks.last_mut().unwrap().b0_pow += parse_pow(tok, "b0")?;
        } else if tok.starts_with("x1") {
            xi1 += parse_pow(tok, "x1")?;
        } else if tok.starts_with("x2") {
            xi2 += parse_pow(tok, "x2")?;
        } else if tok.starts_with('k') {
            blocks.last_mut().unwrap().k_pow += parse_pow(tok, "k")?;
        } else {
            return Err(format!("unknown token `{}`", tok));
        }
    }
    Ok((Word::from_chain(blocks, letters, xi1, xi2, chiral), coeff))
}

// ---------------------------------------------------------------------------
// The squared-operator symbols and their parametrix
// ---------------------------------------------------------------------------

/// Symbols of the squared operator, graded by momentum degree: (a2, a1, a0).
pub fn dirac_square_symbols() -> (SymbolExpr, SymbolExpr, SymbolExpr) {
    // a2 = ξ₁² + k² ξ₂².
    let mut a2 = SymbolExpr::zero();
    a2.insert_add(
        Word {
            head: Block::default(),
            tail: vec![],
            xi1: 2,
            xi2: 0,
            chiral: false,
        },
        Gauss::one(),
    );
    a2.insert_add(
        Word {
            head: Block::new(2, 0),
            tail: vec![],
            xi1: 0,
            xi2: 2,
            chiral: false,
        },
        Gauss::one(),
    );

    // a1 = (3/2·k·δ₂(k) + 1/2·δ₂(k)·k + γ·δ₁(k)) ξ₂.
    let mut a1 = SymbolExpr::zero();
    a1.insert_add(
        Word {
            head: Block::new(1, 0),
            tail: vec![(Letter::D2, Block::default())],
            xi1: 0,
            xi2: 1,
            chiral: false,
        },
        Gauss::from_ratio(3, 2),
    );
    a1.insert_add(
        Word {
            head: Block::default(),
            tail: vec![(Letter::D2, Block::new(1, 0))],
            xi1: 0,
            xi2: 1,
            chiral: false,
        },
        Gauss::from_ratio(1, 2),
    );
    a1.insert_add(
        Word {
            head: Block::default(),
            tail: vec![(Letter::D1, Block::default())],
            xi1: 0,
            xi2: 1,
            chiral: true,
        },
        Gauss::one(),
    );

    // a0 = 1/4·δ₂(k)² + 1/2·γ·δ₁δ₂(k) + 1/2·k·δ₂²(k).
    let mut a0 = SymbolExpr::zero();
    a0.insert_add(
        Word {
            head: Block::default(),
            tail: vec![
                (Letter::D2, Block::default()),
                (Letter::D2, Block::default()),
            ],
            xi1: 0,
            xi2: 0,
            chiral: false,
        },
        Gauss::from_ratio(1, 4),
    );
    a0.insert_add(
        Word {
            head: Block::default(),
            tail: vec![(Letter::D12, Block::default())],
            xi1: 0,
            xi2: 0,
            chiral: true,
        },
        Gauss::from_ratio(1, 2),
    );
    a0.insert_add(
        Word {
            head: Block::new(1, 0),
            tail: vec![(Letter::D22, Block::default())],
            xi1: 0,
            xi2: 0,
            chiral: false,
        },
        Gauss::from_ratio(1, 2),
    );

    (a2, a1, a0)
}

/// The three leading parametrix symbols (b0, b1, b2) of the squared
/// operator, solved order by order from the composition identity.
pub fn parametrix() -> Result<(SymbolExpr, SymbolExpr, SymbolExpr), SymbolError> {
    let (a2, a1, a0) = dirac_square_symbols();
    let b0 = SymbolExpr::b0();

    let d1a2 = a2.delta(Dir::One)?;
    let d2a2 = a2.delta(Dir::Two)?;
    let d1a1 = a1.delta(Dir::One)?;
    let d2a1 = a1.delta(Dir::Two)?;
    let d11a2 = d1a2.delta(Dir::One)?;
    let d22a2 = d2a2.delta(Dir::Two)?;
    let d12a2 = d2a2.delta(Dir::One)?;

    let p1b0 = b0.xi_deriv(Dir::One);
    let p2b0 = b0.xi_deriv(Dir::Two);

    let b1 = b0
        .mul(&a1)
        .mul(&b0)
        .add(&p1b0.mul(&d1a2).mul(&b0))
        .add(&p2b0.mul(&d2a2).mul(&b0))
        .neg();

    let p1b1 = b1.xi_deriv(Dir::One);
    let p2b1 = b1.xi_deriv(Dir::Two);
    let p11b0 = p1b0.xi_deriv(Dir::One);
    let p22b0 = p2b0.xi_deriv(Dir::Two);
    let p12b0 = p1b0.xi_deriv(Dir::Two);

    let half = Gauss::from_ratio(1, 2);
    let b2 = b0
        .mul(&a0)
        .mul(&b0)
        .add(&b1.mul(&a1).mul(&b0))
        .add(&p1b0.mul(&d1a1).mul(&b0))
        .add(&p2b0.mul(&d2a1).mul(&b0))
        .add(&p1b1.mul(&d1a2).mul(&b0))
        .add(&p2b1.mul(&d2a2).mul(&b0))
        .add(&p11b0.mul(&d11a2).mul(&b0).scale(&half))
        .add(&p22b0.mul(&d22a2).mul(&b0).scale(&half))
        .add(&p12b0.mul(&d12a2).mul(&b0))
        .neg();

    Ok((b0, b1, b2))
}

/// Truncated composition of graded symbols: Σ_α (1/α!) ∂_ξ^α(p) δ^α(q).
///
/// Each operand is a list of (grade, expression) slots; a slot pair is kept
/// when grade_p − |α| + grade_q ≥ `min_order`.  Grades are declared rather
/// than read off the words because a regularized leading slot like a₂ + 1
/// carries its constant at the leading grade.
pub fn compose_truncated(
    p: &[(i64, &SymbolExpr)],
    q: &[(i64, &SymbolExpr)],
    min_order: i64,
) -> Result<SymbolExpr, SymbolError> {
    let alphas: [(u32, u32, Gauss); 6] = [
        (0, 0, Gauss::one()),
        (1, 0, Gauss::one()),
        (0, 1, Gauss::one()),
        (2, 0, Gauss::from_ratio(1, 2)),
        (1, 1, Gauss::one()),
        (0, 2, Gauss::from_ratio(1, 2)),
    ];
    let mut out = SymbolExpr::zero();
    for (gp, ep) in p {
        for (gq, eq) in q {
            for (a1, a2, fact) in &alphas {
                if gp - (a1 + a2) as i64 + gq < min_order {
                    continue;
                }
                let dp = ep.xi_deriv_multi(*a1, *a2);
                if dp.is_zero() {
                    continue;
                }
                let dq = eq.delta_multi(*a1, *a2)?;
                if dq.is_zero() {
                    continue;
                }
                out = out.add(&dp.mul(&dq).scale(fact));
            }
        }
    }
    Ok(out)
}

/// The graded slots of the shifted squared-operator symbol: the unit rides
/// along with the leading part.
pub fn shifted_symbol_slots(
    a2: &SymbolExpr,
    a1: &SymbolExpr,
    a0: &SymbolExpr,
) -> [(i64, SymbolExpr); 3] {
    [
        (2, a2.add(&SymbolExpr::one())),
        (1, a1.clone()),
        (0, a0.clone()),
    ]
}
