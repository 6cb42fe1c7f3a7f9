//! Assembly of the curvature packages and everything downstream of them:
//! verification against the embedded function tables, the trace reduction to
//! a one-variable kernel with its vanishing identity, and the two closing
//! algebraic functionals.
//!
//! A package collects, per operand shape, the closed-form modular function
//! obtained by summing the rearranged words of the subleading parametrix
//! term.  Words with one derivative letter feed the `single` entries, words
//! with two separated letters the `pair` entries, and words whose two equal
//! letters are adjacent (trivial middle slot) the `prod` entries, where the
//! product acts as a single operand.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Zero;

use crate::modfn::{ModFnError, ModularFunction};
use crate::ratfn::{rat_i64, Rat, RatFn1, RatFn2};
use crate::rearrange::{describe, RearrangeError};
use crate::scalar::Gauss;
use crate::symbol::{Letter, SymbolError, SymbolExpr};

/// Errors from package assembly and verification.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvatureError {
    Symbol(SymbolError),
    Rearrange(RearrangeError),
    ModFn(ModFnError),
    /// A reference table or package missed an expected entry.
    MissingEntry(String),
    /// Parse failure in a reference table.
    Parse(String),
    /// A value had the wrong shape (e.g. a non-constant where a constant is
    /// required, or non-uniform functional weights).
    Shape(String),
}

impl From<SymbolError> for CurvatureError {
    fn from(e: SymbolError) -> Self {
        CurvatureError::Symbol(e)
    }
}

impl From<RearrangeError> for CurvatureError {
    fn from(e: RearrangeError) -> Self {
        CurvatureError::Rearrange(e)
    }
}

impl From<ModFnError> for CurvatureError {
    fn from(e: ModFnError) -> Self {
        CurvatureError::ModFn(e)
    }
}

impl core::fmt::Display for CurvatureError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CurvatureError::Symbol(e) => write!(f, "{}", e),
            CurvatureError::Rearrange(e) => write!(f, "{}", e),
            CurvatureError::ModFn(e) => write!(f, "{}", e),
            CurvatureError::MissingEntry(m) => write!(f, "missing entry: {}", m),
            CurvatureError::Parse(m) => write!(f, "table parse error: {}", m),
            CurvatureError::Shape(m) => write!(f, "unexpected shape: {}", m),
        }
    }
}

/// The two spin-trace channels of the subleading symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Plain,
    Chiral,
}

/// Operand shape of a word: two separated letters, an adjacent equal-letter
/// product, or a lone second-derivative letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OperandTag {
    Pair(Letter, Letter),
    Prod(Letter),
    Single(Letter),
}

impl core::fmt::Display for OperandTag {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OperandTag::Pair(a, b) => write!(f, "pair({},{})", a.token(), b.token()),
            OperandTag::Prod(l) => write!(f, "prod({}^2)", l.token()),
            OperandTag::Single(l) => write!(f, "single({})", l.token()),
        }
    }
}

impl OperandTag {
    pub fn parse(text: &str) -> Result<OperandTag, CurvatureError> {
        let bad = || CurvatureError::Parse(format!("bad operand tag `{}`", text));
        let inner = |prefix: &str| -> Option<&str> {
            text.strip_prefix(prefix)?
                .strip_prefix('(')?
                .strip_suffix(')')
        };
        if let Some(body) = inner("pair") {
            let (a, b) = body.split_once(',').ok_or_else(bad)?;
            let a = Letter::from_token(a.trim()).ok_or_else(bad)?;
            let b = Letter::from_token(b.trim()).ok_or_else(bad)?;
            return Ok(OperandTag::Pair(a, b));
        }
        if let Some(body) = inner("prod") {
            let base = body.strip_suffix("^2").ok_or_else(bad)?;
            let l = Letter::from_token(base.trim()).ok_or_else(bad)?;
            return Ok(OperandTag::Prod(l));
        }
        if let Some(body) = inner("single") {
            let l = Letter::from_token(body.trim()).ok_or_else(bad)?;
            return Ok(OperandTag::Single(l));
        }
        Err(bad())
    }
}

/// A table of modular functions keyed by operand shape.
pub type FunctionTable = BTreeMap<OperandTag, ModularFunction>;

/// Parses a reference table: one `tag = expression` line per entry, with
/// `#` comments and blank lines skipped.
pub fn parse_table(text: &str) -> Result<FunctionTable, CurvatureError> {
    let mut out = FunctionTable::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (tag, expr) = line
            .split_once('=')
            .ok_or_else(|| CurvatureError::Parse(format!("missing `=` in `{}`", line)))?;
        let tag = OperandTag::parse(tag.trim())?;
        let value = ModularFunction::parse(expr.trim())
            .map_err(|e| CurvatureError::Parse(format!("{}: {}", tag, e)))?;
        if out.insert(tag, value).is_some() {
            return Err(CurvatureError::Parse(format!("duplicate tag `{}`", tag)));
        }
    }
    Ok(out)
}

/// The assembled closed-form curvature functions of one channel, together
/// with the normalization constant applied to the raw word sums (the unit
/// for a freshly assembled package).
#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePackage {
    pub channel: Channel,
    pub entries: FunctionTable,
    pub normalization: Gauss,
}

/// Classifies a word and returns its tag with the descriptor to integrate.
fn classify(
    word: &crate::symbol::Word,
    coeff: &Gauss,
) -> Result<(OperandTag, crate::rearrange::IntegralDescriptor), CurvatureError> {
    let d = describe(word, coeff)?;
    match d.letters.len() {
        1 => Ok((OperandTag::Single(d.letters[0]), d)),
        2 => {
            if d.letters[0] == d.letters[1] {
                if let Some(m) = d.merged() {
                    return Ok((OperandTag::Prod(d.letters[0]), m));
                }
            }
            Ok((OperandTag::Pair(d.letters[0], d.letters[1]), d))
        }
        n => Err(CurvatureError::Shape(format!("{} letters", n))),
    }
}

/// Assembles the curvature package of a channel from the subleading
/// parametrix term: spin-trace projection, word classification, closed-form
/// integration, and per-tag summation.  No normalization is applied.
pub fn assemble(channel: Channel) -> Result<CurvaturePackage, CurvatureError> {
    let (_, _, b2) = crate::symbol::parametrix()?;
    let part = match channel {
        Channel::Plain => b2.even_part().spin_plain_part(),
        Channel::Chiral => b2.even_part().spin_chiral_part(),
    };
    assemble_from(channel, &part)
}

/// Same as [`assemble`] but on a caller-provided word list (used by the
/// verification commands to run on the embedded reference lists).
pub fn assemble_from(
    channel: Channel,
    part: &SymbolExpr,
) -> Result<CurvaturePackage, CurvatureError> {
    let mut entries = FunctionTable::new();
    for (w, c) in &part.words {
        let (tag, descriptor) = classify(w, c)?;
        let f = descriptor.eval_closed()?;
        let slot = entries.entry(tag).or_insert_with(ModularFunction::zero);
        *slot = slot.add(&f)?;
    }
    Ok(CurvaturePackage {
        channel,
        entries,
        normalization: Gauss::one(),
    })
}

impl CurvaturePackage {
    /// The entry of a tag, with missing tags reading as zero.
    pub fn entry(&self, tag: &OperandTag) -> ModularFunction {
        self.entries
            .get(tag)
            .cloned()
            .unwrap_or_else(ModularFunction::zero)
    }

    /// Rescales every entry by a constant.
    pub fn scaled(&self, c: &Gauss) -> Result<CurvaturePackage, CurvatureError> {
        let mut entries = FunctionTable::new();
        for (tag, f) in &self.entries {
            let scaled = f.scale_gauss(c).ok_or_else(|| {
                CurvatureError::Shape("mixed real/imaginary normalization".into())
            })?;
            entries.insert(*tag, scaled);
        }
        Ok(CurvaturePackage {
            channel: self.channel,
            entries,
            normalization: &self.normalization * c,
        })
    }

    /// Fits the single normalization constant on the anchor entry and checks
    /// every table entry against the package exactly.  Returns the constant
    /// and the per-tag comparison of `constant · computed` with the table.
    pub fn verify_against(
        &self,
        table: &FunctionTable,
        anchor: &OperandTag,
    ) -> Result<(Gauss, Vec<(OperandTag, bool)>), CurvatureError> {
        let anchor_ref = table
            .get(anchor)
            .ok_or_else(|| CurvatureError::MissingEntry(format!("{}", anchor)))?;
        let anchor_val = self.entries.get(anchor).ok_or_else(|| {
            CurvatureError::MissingEntry(format!("computed {}", anchor))
        })?;
        let c = anchor_ref.constant_ratio(anchor_val).ok_or_else(|| {
            CurvatureError::Shape(format!("no constant relates the {} entries", anchor))
        })?;
        let scaled = self.scaled(&c)?;
        let mut report = Vec::new();
        let mut tags: Vec<OperandTag> = table.keys().copied().collect();
        for t in scaled.entries.keys() {
            if !table.contains_key(t) {
                tags.push(*t);
            }
        }
        for tag in tags {
            let reference = table.get(&tag).cloned().unwrap_or_else(ModularFunction::zero);
            let got = scaled.entry(&tag);
            report.push((tag, got.eq_value(&reference)));
        }
        Ok((c, report))
    }
}

// ---------------------------------------------------------------------------
// Trace reduction
// ---------------------------------------------------------------------------

/// The modular weights picked up when a lone second-derivative operand
/// `k^{−p} δδ(k)` is rewritten into single-derivative pairs:
/// `Σ_{r=1}^{p} s^{−min(r, p+1−r)}`.
pub fn leibniz_rf(p: u32) -> RatFn2 {
    let mut acc = RatFn2::zero();
    for r in 1..=p {
        let e = core::cmp::min(r, p + 1 - r) as i64;
        acc = acc.add(&RatFn2::one().mul_monomial(-e, 0));
    }
    acc
}

/// The constant value of a modular function that has no variable left.
fn mf_constant(m: &ModularFunction) -> Option<Rat> {
    if m.is_zero() {
        return Some(Rat::zero());
    }
    if !m.rf.den.is_empty() {
        return None;
    }
    m.rf.num.as_constant()
}

/// Reduces one operand sector (pair, prod, single of a fixed direction) to
/// its one-variable kernel: the pair entry at `t = 1`, the prod entry at its
/// own variable `= 1`, and the single entry rewritten through the Leibniz
/// identity with one extra inverse power of `k`.
fn reduce_sector(
    pair: &ModularFunction,
    prod: &ModularFunction,
    single: &ModularFunction,
) -> Result<ModularFunction, CurvatureError> {
    let mut acc = pair.subst_t_one()?;
    acc = acc.add(&prod.subst_s_one()?)?;
    if !single.is_zero() {
        let at_one = single.subst_s_one()?;
        let c = mf_constant(&at_one).ok_or_else(|| {
            CurvatureError::Shape("single entry not constant at s = 1".into())
        })?;
        let p = u32::try_from(-single.k_prefactor)
            .map_err(|_| CurvatureError::Shape("single entry has nonnegative k power".into()))?;
        let rewritten = ModularFunction {
            k_prefactor: single.k_prefactor - 1,
            pi_power: at_one.pi_power,
            i_power: at_one.i_power,
            rf: leibniz_rf(p).scale(&c),
        };
        acc = acc.add(&rewritten)?;
    }
    Ok(acc)
}

/// Trace reduction of the spin-scalar package: returns the one-variable
/// kernel `H(s)` of the first-direction sector and the residual of the
/// second-direction sector (which must vanish).
pub fn trace_reduce_plain(
    pkg: &CurvaturePackage,
) -> Result<(ModularFunction, ModularFunction), CurvatureError> {
    let h = reduce_sector(
        &pkg.entry(&OperandTag::Pair(Letter::D1, Letter::D1)),
        &pkg.entry(&OperandTag::Prod(Letter::D1)),
        &pkg.entry(&OperandTag::Single(Letter::D11)),
    )?;
    let sector2 = reduce_sector(
        &pkg.entry(&OperandTag::Pair(Letter::D2, Letter::D2)),
        &pkg.entry(&OperandTag::Prod(Letter::D2)),
        &pkg.entry(&OperandTag::Single(Letter::D22)),
    )?;
    Ok((h, sector2))
}

/// Trace reduction of the chiral package: the two pair entries at `t = 1`
/// and the single entry at `s = 1`, each of which must vanish exactly.
pub fn trace_reduce_chiral(
    pkg: &CurvaturePackage,
) -> Result<[ModularFunction; 3], CurvatureError> {
    Ok([
        pkg.entry(&OperandTag::Pair(Letter::D1, Letter::D2))
            .subst_t_one()?,
        pkg.entry(&OperandTag::Pair(Letter::D2, Letter::D1))
            .subst_t_one()?,
        pkg.entry(&OperandTag::Single(Letter::D12)).subst_s_one()?,
    ])
}

/// Checks the vanishing identity of the one-variable kernel:
/// `s³ H(s) + H(1/s) = 0` and `H(1) = 0`.
pub fn kernel_identity_holds(h: &ModularFunction) -> Result<bool, CurvatureError> {
    if h.is_zero() {
        return Ok(true);
    }
    let h1 = RatFn1::from_two_var(&h.rf)
        .ok_or_else(|| CurvatureError::Shape("kernel is not one-variable".into()))?;
    let lhs = h1.mul_power(3).add(&h1.recip_substitute());
    let at_one = h.subst_s_one()?;
    Ok(lhs.is_zero() && at_one.is_zero())
}

// ---------------------------------------------------------------------------
// Algebraic functionals
// ---------------------------------------------------------------------------

/// One term of an algebraic functional of the conformal factor: either a
/// split pair `coeff · k^{−p} δ₁(k) k^{−q} δ₁(k)` or a second derivative
/// `coeff · k^{−p} δ₁₁(k)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionalTerm {
    PairTerm { coeff: BigRational, p: u32, q: u32 },
    SecondTerm { coeff: BigRational, p: u32 },
}

impl FunctionalTerm {
    fn weight(&self) -> u32 {
        match self {
            FunctionalTerm::PairTerm { p, q, .. } => p + q,
            FunctionalTerm::SecondTerm { p, .. } => p + 1,
        }
    }

    fn kernel(&self) -> RatFn2 {
        match self {
            FunctionalTerm::PairTerm { coeff, q, .. } => RatFn2::one()
                .mul_monomial(-(*q as i64), 0)
                .scale(coeff),
            FunctionalTerm::SecondTerm { coeff, p } => leibniz_rf(*p).scale(coeff),
        }
    }
}

/// The two-bein functional `𝔱(−4 k⁻² δ₁(k) k⁻¹ δ₁(k) + 2 k⁻² δ₁₁(k))`.
pub fn two_bein_terms() -> Vec<FunctionalTerm> {
    vec![
        FunctionalTerm::PairTerm {
            coeff: rat_i64(-4, 1),
            p: 2,
            q: 1,
        },
        FunctionalTerm::SecondTerm {
            coeff: rat_i64(2, 1),
            p: 2,
        },
    ]
}

/// The connection-Laplacian functional
/// `2 𝔱(−9/4 k⁻² δ₁(k) k⁻¹ δ₁(k) + 1/4 k⁻³ δ₁(k) δ₁(k) + k⁻² δ₁₁(k))`.
pub fn connection_terms() -> Vec<FunctionalTerm> {
    vec![
        FunctionalTerm::PairTerm {
            coeff: rat_i64(-9, 2),
            p: 2,
            q: 1,
        },
        FunctionalTerm::PairTerm {
            coeff: rat_i64(1, 2),
            p: 3,
            q: 0,
        },
        FunctionalTerm::SecondTerm {
            coeff: rat_i64(2, 1),
            p: 2,
        },
    ]
}

/// Sums the one-variable kernels of a functional's terms, checking that all
/// terms carry the same total inverse power of `k`.  Returns the weight and
/// the kernel.
pub fn functional_kernel(terms: &[FunctionalTerm]) -> Result<(u32, RatFn2), CurvatureError> {
    let w = terms
        .first()
        .ok_or_else(|| CurvatureError::Shape("empty functional".into()))?
        .weight();
    let mut acc = RatFn2::zero();
    for t in terms {
        if t.weight() != w {
            return Err(CurvatureError::Shape(format!(
                "weights {} and {} in one functional",
                w,
                t.weight()
            )));
        }
        acc = acc.add(&t.kernel());
    }
    Ok((w, acc))
}

/// The Laurent coefficients of a kernel whose denominator is a pure power of
/// `s`, as a map from exponent to coefficient.
pub fn kernel_laurent(rf: &RatFn2) -> Option<BTreeMap<i64, Rat>> {
    let mut shift = 0i64;
    for (irr, e) in &rf.den.powers {
        if *irr != crate::ratfn::Irr::S {
            return None;
        }
        shift = *e as i64;
    }
    if rf.den.powers.len() > 1 {
        return None;
    }
    let mut out = BTreeMap::new();
    for ((i, j), c) in &rf.num.terms {
        if *j != 0 {
            return None;
        }
        if !c.is_zero() {
            out.insert(*i as i64 - shift, c.clone());
        }
    }
    Some(out)
}

/// Symmetrizes a weight-`w` kernel: `G_sym(s) = ½ (G(s) + s^{−w} G(1/s))`.
pub fn symmetrize_kernel(weight: u32, rf: &RatFn2) -> Result<RatFn2, CurvatureError> {
    let laurent = kernel_laurent(rf)
        .ok_or_else(|| CurvatureError::Shape("kernel is not a Laurent polynomial".into()))?;
    let mut acc = RatFn2::zero();
    let half = rat_i64(1, 2);
    for (e, c) in &laurent {
        acc = acc.add(
            &RatFn2::one()
                .mul_monomial(*e, 0)
                .scale(&(c.clone() * half.clone())),
        );
        acc = acc.add(
            &RatFn2::one()
                .mul_monomial(-e - weight as i64, 0)
                .scale(&(c.clone() * half.clone())),
        );
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goldens;

    fn plain_table() -> FunctionTable {
        parse_table(goldens::CURVATURE_PLAIN).unwrap()
    }

    fn chiral_table() -> FunctionTable {
        parse_table(goldens::CURVATURE_CHIRAL).unwrap()
    }

    #[test]
    fn operand_tags_roundtrip() {
        for tag in [
            OperandTag::Pair(Letter::D1, Letter::D1),
            OperandTag::Pair(Letter::D2, Letter::D1),
            OperandTag::Prod(Letter::D2),
            OperandTag::Single(Letter::D12),
        ] {
            assert_eq!(OperandTag::parse(&format!("{}", tag)).unwrap(), tag);
        }
        assert!(OperandTag::parse("pair(d1k)").is_err());
        assert!(OperandTag::parse("prod(d1k^3)").is_err());
    }

    #[test]
    fn plain_package_matches_the_printed_table_exactly() {
        let pkg = assemble(Channel::Plain).unwrap();
        let (c, report) = pkg
            .verify_against(&plain_table(), &OperandTag::Single(Letter::D11))
            .unwrap();
        assert_eq!(c, Gauss::one(), "spin-scalar normalization must be 1");
        for (tag, ok) in &report {
            assert!(
                ok,
                "entry {} deviates from the reference table:\ncomputed: {}",
                tag,
                pkg.entry(tag)
            );
        }
        assert_eq!(report.len(), 6);
    }

    #[test]
    fn chiral_package_matches_the_printed_table_exactly() {
        let pkg = assemble(Channel::Chiral).unwrap();
        let (c, report) = pkg
            .verify_against(&chiral_table(), &OperandTag::Single(Letter::D12))
            .unwrap();
        assert_eq!(c, -Gauss::i(), "chiral normalization must be -i");
        for (tag, ok) in &report {
            assert!(ok, "entry {} deviates from the reference table", tag);
        }
        assert_eq!(report.len(), 3);
    }

    #[test]
    fn trace_reduction_gives_the_printed_kernel_and_identities() {
        let pkg = assemble(Channel::Plain).unwrap();
        let (h, sector2) = trace_reduce_plain(&pkg).unwrap();
        let reference = ModularFunction::parse(
            "(pi/3) * k^-3 * (1-s) / (s * (s+1)^2)",
        )
        .unwrap();
        assert!(
            h.eq_value(&reference),
            "kernel deviates: computed {}",
            h
        );
        assert!(sector2.is_zero(), "second sector residual: {}", sector2);
        assert!(kernel_identity_holds(&h).unwrap());

        // The identity detects corruption.
        let wrong = ModularFunction::parse("k^-3 * (1-s) / (s+1)^2").unwrap();
        assert!(!kernel_identity_holds(&wrong).unwrap());
    }

    #[test]
    fn chiral_substitutions_vanish() {
        let pkg = assemble(Channel::Chiral).unwrap();
        let subs = trace_reduce_chiral(&pkg).unwrap();
        for (i, v) in subs.iter().enumerate() {
            assert!(v.is_zero(), "chiral substitution {} is {}", i, v);
        }
    }

    #[test]
    fn leibniz_weights_fold_symmetrically() {
        assert!(leibniz_rf(2).eq_value(&RatFn2::one().mul_monomial(-1, 0).scale(&rat_i64(2, 1))));
        // p = 3: weights min(r, 4−r) for r = 1,2,3 are 1,2,1.
        let expected = RatFn2::one()
            .mul_monomial(-1, 0)
            .scale(&rat_i64(2, 1))
            .add(&RatFn2::one().mul_monomial(-2, 0));
        assert!(leibniz_rf(3).eq_value(&expected));
    }

    #[test]
    fn two_bein_kernel_vanishes_identically() {
        let (w, kernel) = functional_kernel(&two_bein_terms()).unwrap();
        assert_eq!(w, 3);
        assert!(kernel.num.is_zero(), "kernel is {:?}", kernel);
    }

    #[test]
    fn connection_kernel_is_nonzero_with_nonnegative_symmetrization() {
        let (w, kernel) = functional_kernel(&connection_terms()).unwrap();
        assert_eq!(w, 3);
        // G(s) = ½ (1 − s⁻¹).
        let expected = RatFn2::constant(rat_i64(1, 2))
            .add(&RatFn2::one().mul_monomial(-1, 0).scale(&rat_i64(-1, 2)));
        assert!(kernel.eq_value(&expected));

        let sym = symmetrize_kernel(w, &kernel).unwrap();
        let laurent = kernel_laurent(&sym).unwrap();
        let quarter = rat_i64(1, 4);
        assert_eq!(laurent[&0], quarter);
        assert_eq!(laurent[&-1], -quarter.clone());
        assert_eq!(laurent[&-2], -quarter.clone());
        assert_eq!(laurent[&-3], quarter);

        // Manifestly nonnegative factorization ¼ (1 − s⁻¹)² (1 + s⁻¹).
        let one_minus = RatFn2::one().add(&RatFn2::one().mul_monomial(-1, 0).neg());
        let one_plus = RatFn2::one().add(&RatFn2::one().mul_monomial(-1, 0));
        let factored = one_minus
            .mul(&one_minus)
            .mul(&one_plus)
            .scale(&rat_i64(1, 4));
        assert!(sym.eq_value(&factored));

        // Mixed weights are rejected.
        let bad = vec![
            FunctionalTerm::PairTerm {
                coeff: rat_i64(1, 1),
                p: 2,
                q: 1,
            },
            FunctionalTerm::SecondTerm {
                coeff: rat_i64(1, 1),
                p: 3,
            },
        ];
        assert!(matches!(
            functional_kernel(&bad),
            Err(CurvatureError::Shape(_))
        ));
    }
}
