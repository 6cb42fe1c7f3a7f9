//! Frozen reference data: hand-checked word lists and closed-form curvature
//! functions, stored as text and parsed on demand.

use crate::classical::{ClassicalError, CPoly};
use crate::curvature::{parse_table, CurvatureError, FunctionTable};
use crate::modfn::{ModFnError, ModularFunction};
use crate::symbol::{SymbolExpr, SymbolError};

pub const B2_EVEN_PLAIN: &str = include_str!("../goldens/b2_even_plain.txt");
pub const B2_EVEN_CHIRAL: &str = include_str!("../goldens/b2_even_chiral.txt");
pub const CLASSICAL_PLAIN: &str = include_str!("../goldens/classical_plain.txt");
pub const CLASSICAL_CHIRAL: &str = include_str!("../goldens/classical_chiral.txt");
pub const CURVATURE_PLAIN: &str = include_str!("../goldens/curvature_plain.txt");
pub const CURVATURE_CHIRAL: &str = include_str!("../goldens/curvature_chiral.txt");
pub const TRACE_H: &str = include_str!("../goldens/trace_h.txt");

/// Reference spin-scalar even part of the subleading parametrix symbol.
pub fn b2_even_plain() -> Result<SymbolExpr, SymbolError> {
    SymbolExpr::parse(B2_EVEN_PLAIN)
}

/// Reference chiral-traced even part of the subleading parametrix symbol.
pub fn b2_even_chiral() -> Result<SymbolExpr, SymbolError> {
    SymbolExpr::parse(B2_EVEN_CHIRAL)
}

/// Reference commutative collapse of the spin-scalar part.
pub fn classical_plain() -> Result<CPoly, ClassicalError> {
    CPoly::parse(CLASSICAL_PLAIN)
}

/// Reference commutative collapse of the chiral part.
pub fn classical_chiral() -> Result<CPoly, ClassicalError> {
    CPoly::parse(CLASSICAL_CHIRAL)
}

/// Reference closed-form curvature functions of the spin-scalar channel.
pub fn curvature_plain() -> Result<FunctionTable, CurvatureError> {
    parse_table(CURVATURE_PLAIN)
}

/// Reference closed-form curvature functions of the chiral channel.
pub fn curvature_chiral() -> Result<FunctionTable, CurvatureError> {
    parse_table(CURVATURE_CHIRAL)
}

/// Reference one-variable kernel of the reduced trace.
pub fn trace_h() -> Result<ModularFunction, ModFnError> {
    let expr = TRACE_H
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("0");
    ModularFunction::parse(expr)
}
