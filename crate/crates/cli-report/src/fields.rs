//! Symmetries and recursion operators from command-line text.

use jet_calculus::Report;
use recursion::RecursionOperator;
use symmetry::{
    is_symmetry, make_d, make_g1, make_g2, make_p, make_r, make_w, EvolutionaryField, GammaSpec,
};

use crate::{parse_expr, CliError};

/// `D`, `G1`, `G2`, `W:<Ω>`, `P:<Φ>` or `R:<Γ spec>` such as `R:Dy^1J^2`.
pub fn parse_field(text: &str) -> Result<EvolutionaryField, CliError> {
    let (head, arg) = text.split_once(':').unwrap_or((text, ""));
    let need_arg = || {
        if arg.trim().is_empty() {
            Err(CliError::Config(format!(
                "field '{head}' needs an argument, as in {head}:<expr>"
            )))
        } else {
            Ok(arg.trim())
        }
    };
    Ok(match head.trim() {
        "D" => make_d()?,
        "G1" => make_g1()?,
        "G2" => make_g2(),
        "W" => make_w(&parse_expr(need_arg()?)?)?,
        "P" => make_p(&parse_expr(need_arg()?)?)?,
        "R" => make_r(GammaSpec::parse(need_arg()?)?)?,
        other => return Err(CliError::Config(format!("unknown field '{other}'"))),
    })
}

/// `T`, `R1:<word>`, `R2:<word>`, `R3:<p0>;<p1>;...` or `R4`.
pub fn parse_operator(text: &str) -> Result<RecursionOperator, CliError> {
    Ok(RecursionOperator::parse(text)?)
}

/// Image of a field and the symmetry verdict on it.
pub fn apply_recursion(op: &str, field: &str) -> Result<(EvolutionaryField, Report), CliError> {
    let image = parse_operator(op)?.apply(&parse_field(field)?)?;
    let report = is_symmetry(&image)?;
    Ok((image, report))
}
