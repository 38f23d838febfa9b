//! Textual loss/class/curve specifications shared by the subcommands.
//!
//! Loss records are flat `family:key=value` strings, e.g.
//! `margin:id=hinge`, `margin:id=sigmoid,k=1`, `comp-sum:tau=1.5,n=4`,
//! `constrained:id=exp`, `sup-margin:id=rho,rho=1,gamma=0.1`,
//! `zero-one`, `adv-zero-one:gamma=0.1`. Class records follow the same
//! shape: `all:n=2`, `complete:n=3`, `linear:W=1,B=0.8,p=2,n=2`,
//! `nn:L=2,W=1,B=0.5,p=2,n=2`, `bounded:L=1,n=3`. Unknown keys are
//! errors.

use hcb_core::aux_fn::{AuxId, AuxiliaryFunction};
use hcb_core::hypothesis::HypothesisClassSpec;
use hcb_core::loss::CompSumParams;
use hcb_core::risk::LossKind;
use std::collections::BTreeMap;

pub type SpecResult<T> = Result<T, String>;

pub struct KvSpec {
    pub head: String,
    pairs: BTreeMap<String, String>,
}

impl KvSpec {
    pub fn parse(text: &str) -> SpecResult<Self> {
        let mut parts = text.splitn(2, ':');
        let head = parts.next().unwrap_or("").trim().to_string();
        if head.is_empty() {
            return Err("empty specification".into());
        }
        let mut pairs = BTreeMap::new();
        if let Some(rest) = parts.next() {
            for item in rest.split(',') {
                let item = item.trim();
                if item.is_empty() {
                    continue;
                }
                let mut kv = item.splitn(2, '=');
                let key = kv.next().unwrap_or("").trim().to_string();
                let value = kv
                    .next()
                    .ok_or_else(|| format!("expected key=value, got `{item}`"))?
                    .trim()
                    .to_string();
                if pairs.insert(key.clone(), value).is_some() {
                    return Err(format!("duplicate key `{key}`"));
                }
            }
        }
        Ok(Self { head, pairs })
    }

    pub fn float(&mut self, key: &str) -> SpecResult<Option<f64>> {
        match self.pairs.remove(key) {
            None => Ok(None),
            Some(v) => v.parse::<f64>().map(Some).map_err(|_| format!("bad number for `{key}`: {v}")),
        }
    }

    pub fn require_float(&mut self, key: &str) -> SpecResult<f64> {
        self.float(key)?.ok_or_else(|| format!("missing required key `{key}`"))
    }

    pub fn usize_value(&mut self, key: &str) -> SpecResult<Option<usize>> {
        match self.pairs.remove(key) {
            None => Ok(None),
            Some(v) => {
                v.parse::<usize>().map(Some).map_err(|_| format!("bad integer for `{key}`: {v}"))
            }
        }
    }

    pub fn string(&mut self, key: &str) -> Option<String> {
        self.pairs.remove(key)
    }

    pub fn finish(self) -> SpecResult<()> {
        if let Some(key) = self.pairs.keys().next() {
            return Err(format!("unknown key `{key}` in `{}` specification", self.head));
        }
        Ok(())
    }
}

/// Auxiliary-function ids accepted on the command line.
pub fn parse_aux(id: &str, k: Option<f64>, rho: Option<f64>, q: Option<f64>) -> SpecResult<(AuxiliaryFunction, AuxId)> {
    Ok(match id {
        "hinge" => (AuxiliaryFunction::hinge(), AuxId::Hinge),
        "logistic2" | "logistic" => (AuxiliaryFunction::logistic2(), AuxId::Logistic2),
        "exponential" | "exp" => (AuxiliaryFunction::exponential(), AuxId::Exponential),
        "quadratic" | "quad" => (AuxiliaryFunction::quadratic(), AuxId::Quadratic),
        "sigmoid" => {
            let k = k.unwrap_or(1.0);
            (AuxiliaryFunction::sigmoid(k), AuxId::Sigmoid { k })
        }
        "rho" | "rho-margin" => {
            let rho = rho.unwrap_or(1.0);
            (AuxiliaryFunction::rho_margin(rho), AuxId::RhoMargin { rho })
        }
        "neg-log" | "neg_log" => (AuxiliaryFunction::neg_log(), AuxId::NegLog),
        "inv-minus-one" | "inv_minus_one" => {
            (AuxiliaryFunction::inv_minus_one(), AuxId::InvMinusOne)
        }
        "gen-ce" | "gen_ce" => {
            let q = q.ok_or("gen-ce needs q=")?;
            (AuxiliaryFunction::gen_ce(q).map_err(|e| e.to_string())?, AuxId::GenCe { q })
        }
        "one-minus" | "one_minus" | "mae" => (AuxiliaryFunction::one_minus(), AuxId::OneMinus),
        "squared" | "sq" => (AuxiliaryFunction::squared(), AuxId::Squared),
        "sq-hinge" | "sq_hinge" => (AuxiliaryFunction::sq_hinge(), AuxId::SqHinge),
        other => return Err(format!("unknown auxiliary function `{other}`")),
    })
}

pub fn parse_loss(text: &str) -> SpecResult<LossKind> {
    let mut spec = KvSpec::parse(text)?;
    let loss = match spec.head.as_str() {
        "zero-one" => LossKind::ZeroOne,
        "adv-zero-one" => {
            let gamma = spec.require_float("gamma")?;
            LossKind::AdversarialZeroOne { gamma }
        }
        "margin" => {
            let id = spec.string("id").ok_or("margin loss needs id=")?;
            let k = spec.float("k")?;
            let rho = spec.float("rho")?;
            let q = spec.float("q")?;
            let phi = parse_aux(&id, k, rho, q)?.0;
            check_log_base(&phi, spec.string("log_base"))?;
            LossKind::Margin(phi)
        }
        "sup-margin" => {
            let id = spec.string("id").ok_or("sup-margin loss needs id=")?;
            let k = spec.float("k")?;
            let rho = spec.float("rho")?;
            let gamma = spec.require_float("gamma")?;
            LossKind::SupMargin { phi: parse_aux(&id, k, rho, None)?.0, gamma }
        }
        "comp-sum" => {
            let tau = spec.require_float("tau")?;
            let n = spec.usize_value("n")?.ok_or("comp-sum needs n=")?;
            LossKind::CompSum(CompSumParams::new(tau, n).map_err(|e| e.to_string())?)
        }
        "constrained" => {
            let id = spec.string("id").ok_or("constrained loss needs id=")?;
            let rho = spec.float("rho")?;
            let phi = parse_aux(&id, None, rho, None)?.0;
            check_log_base(&phi, spec.string("log_base"))?;
            LossKind::Constrained(phi)
        }
        other => return Err(format!("unknown loss family `{other}`")),
    };
    spec.finish()?;
    Ok(loss)
}

/// Entries whose definition contains a logarithm carry a fixed base; a
/// record that names a different one is a construction error, not a
/// conversion. Log-free entries accept either declaration.
fn check_log_base(phi: &AuxiliaryFunction, declared: Option<String>) -> SpecResult<()> {
    use hcb_core::{AuxId, LogBase};
    let Some(declared) = declared else { return Ok(()) };
    let want = match declared.as_str() {
        "two" | "2" => LogBase::Two,
        "natural" | "e" => LogBase::Natural,
        other => return Err(format!("unknown log_base `{other}`")),
    };
    let pinned = matches!(phi.id, AuxId::Logistic2 | AuxId::NegLog);
    if pinned && phi.log_base != want {
        return Err(format!(
            "log_base mismatch: `{}` is defined with {:?}, record says {:?}",
            phi.id, phi.log_base, want
        ));
    }
    Ok(())
}

pub fn parse_class(text: &str) -> SpecResult<HypothesisClassSpec> {
    let mut spec = KvSpec::parse(text)?;
    let n = spec.usize_value("n")?.unwrap_or(2);
    let gamma = spec.float("gamma")?;
    let class = match spec.head.as_str() {
        "all" => HypothesisClassSpec::all_measurable(n),
        "complete" => HypothesisClassSpec::complete_symmetric(n),
        "bounded" => HypothesisClassSpec::bounded_symmetric(spec.require_float("L")?, n)
            .map_err(|e| e.to_string())?,
        "linear" => HypothesisClassSpec::linear(
            spec.require_float("W")?,
            spec.require_float("B")?,
            spec.float("p")?.unwrap_or(2.0),
            n,
        )
        .map_err(|e| e.to_string())?,
        "nn" => HypothesisClassSpec::one_layer_nn(
            spec.require_float("L")?,
            spec.require_float("W")?,
            spec.require_float("B")?,
            spec.float("p")?.unwrap_or(2.0),
            n,
        )
        .map_err(|e| e.to_string())?,
        other => return Err(format!("unknown class `{other}`")),
    };
    spec.finish()?;
    Ok(match gamma {
        Some(g) => class.with_gamma(g),
        None => class,
    })
}

/// Transformation-curve specifications, e.g.
/// `binary-linear:id=hinge,B=0.5`, `binary-nn:id=hinge,B=0.5,L=2`,
/// `comp-sum:tau=1,n=3`, `comp-sum-poly:tau=1,n=3`,
/// `table-comp:id=neg-log,n=4`, `table-cstnd:id=exp`,
/// `table-sum:id=sq-hinge`, `max-rho:rho=1,B=0.25`,
/// `adversarial-rho:B=1,rho=1`, `massart:id=quadratic,B=5,beta=0.25,adv=0`,
/// `bounded-psi:id=logistic,L=1,n=2`.
pub fn parse_curve(text: &str) -> SpecResult<hcb_core::TransformCurve> {
    use hcb_core::transform::{
        adversarial_rho_transform, binary_linear_transform, bounded_cstnd_exp_psi,
        bounded_hypothesis_psi, comp_sum_poly_bounds, comp_sum_transform, massart_modified,
        multiclass_table_transform, BoundedPsiLoss, TableFamily, TableParams,
    };
    let mut spec = KvSpec::parse(text)?;
    let err = |e: hcb_core::HcbError| e.to_string();
    let curve = match spec.head.as_str() {
        "binary-linear" | "binary-nn" => {
            let id = spec.string("id").ok_or("needs id=")?;
            let k = spec.float("k")?;
            let rho = spec.float("rho")?;
            let mut b = spec.require_float("B")?;
            if spec.head == "binary-nn" {
                b *= spec.require_float("L")?;
            }
            let (_, aux_id) = parse_aux(&id, k, rho, None)?;
            binary_linear_transform(&aux_id, b).map_err(err)?
        }
        "comp-sum" => {
            let tau = spec.require_float("tau")?;
            let n = spec.usize_value("n")?.ok_or("needs n=")?;
            comp_sum_transform(tau, n).map_err(err)?
        }
        "comp-sum-poly" => {
            let tau = spec.require_float("tau")?;
            let n = spec.usize_value("n")?.ok_or("needs n=")?;
            comp_sum_poly_bounds(tau, n).map_err(err)?.0
        }
        "table-comp" | "table-cstnd" | "table-sum" | "max-rho" => {
            let family = match spec.head.as_str() {
                "table-comp" => TableFamily::CompSumPhi,
                "table-cstnd" => TableFamily::CstndPhi,
                "table-sum" => TableFamily::SumLoss,
                _ => TableFamily::MaxRho,
            };
            let id = if family == TableFamily::MaxRho {
                "rho".to_string()
            } else {
                spec.string("id").ok_or("needs id=")?
            };
            let q = spec.float("q")?;
            let rho = spec.float("rho")?;
            let n = spec.usize_value("n")?.unwrap_or(4);
            let params = TableParams { b_bound: spec.float("B")?, lambda: spec.float("L")? };
            let (_, aux_id) = parse_aux(&id, None, rho, q)?;
            multiclass_table_transform(family, &aux_id, n, params).map_err(err)?
        }
        "adversarial-rho" => {
            let b = spec.require_float("B")?;
            let rho = spec.float("rho")?.unwrap_or(1.0);
            let lambda = spec.float("L")?;
            adversarial_rho_transform(b, rho, lambda).map_err(err)?
        }
        "massart" => {
            let id = spec.string("id").ok_or("needs id=")?;
            let k = spec.float("k")?;
            let rho = spec.float("rho")?;
            let b = spec.require_float("B")?;
            let beta = spec.require_float("beta")?;
            let adversarial = spec.float("adv")?.unwrap_or(0.0) != 0.0;
            let (_, aux_id) = parse_aux(&id, k, rho, None)?;
            let base = binary_linear_transform(&aux_id, b).map_err(err)?;
            massart_modified(&base, beta, adversarial).map_err(err)?
        }
        "bounded-psi" => {
            let id = spec.string("id").ok_or("needs id=")?;
            let lambda = spec.require_float("L")?;
            let n = spec.usize_value("n")?.unwrap_or(2);
            match id.as_str() {
                "cstnd-exp" | "cstnd_exp" => bounded_cstnd_exp_psi(lambda).map_err(err)?,
                other => {
                    let loss = match other {
                        "logistic" => BoundedPsiLoss::Logistic,
                        "sum-exp" | "sum_exponential" => BoundedPsiLoss::SumExponential,
                        "gen-ce" | "gen_ce" => BoundedPsiLoss::GenCe {
                            q: spec.float("q")?.ok_or("gen-ce needs q=")?,
                        },
                        "mae" => BoundedPsiLoss::Mae,
                        _ => return Err(format!("unknown bounded-psi id `{other}`")),
                    };
                    let class = HypothesisClassSpec::bounded_symmetric(lambda, n)
                        .map_err(|e| e.to_string())?;
                    bounded_hypothesis_psi(loss, &class).map_err(err)?
                }
            }
        }
        other => return Err(format!("unknown curve family `{other}`")),
    };
    spec.finish()?;
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_curves() {
        for text in [
            "binary-linear:id=hinge,B=0.5",
            "binary-nn:id=sigmoid,k=1,B=0.5,L=2",
            "comp-sum:tau=1,n=3",
            "table-cstnd:id=exp",
            "adversarial-rho:B=0.8,rho=1",
            "massart:id=quadratic,B=5,beta=0.25,adv=0",
            "bounded-psi:id=logistic,L=1,n=2",
            "bounded-psi:id=cstnd-exp,L=1",
        ] {
            parse_curve(text).unwrap_or_else(|e| panic!("{text}: {e}"));
        }
        assert!(parse_curve("binary-linear:id=hinge,B=0.5,junk=1").is_err());
    }

    #[test]
    fn parses_known_specs() {
        assert!(parse_loss("margin:id=hinge").is_ok());
        assert!(parse_loss("comp-sum:tau=1,n=3").is_ok());
        assert!(parse_loss("sup-margin:id=rho,rho=1,gamma=0.1").is_ok());
        assert!(parse_class("linear:W=1,B=0.8,p=2,n=2").is_ok());
        assert!(parse_class("bounded:L=1,n=3").is_ok());
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(parse_loss("margin:id=hinge,bogus=1").is_err());
        assert!(parse_class("linear:W=1,B=1,extra=2").is_err());
        assert!(parse_loss("margin:id=nope").is_err());
    }

    #[test]
    fn log_base_mixing_is_a_construction_error() {
        assert!(parse_loss("margin:id=logistic2,log_base=two").is_ok());
        assert!(parse_loss("margin:id=logistic2,log_base=natural").is_err());
        assert!(parse_loss("constrained:id=exp,log_base=natural").is_ok());
    }
}
