//! JSON forms of matrices, quiver modules and pairings. Numbers are strings
//! (`"-1/2"`, `"1/3+2*i"`), germs are strings in the parser syntax.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::germ::Germ;
use crate::nilalg::Mat;
use crate::parse::{parse_germ, parse_gr};
use crate::quiver::VGradedModule;
use crate::scalar::{Cx, GaussianRational as G};
use crate::sesqui::DistPairing;

fn jerr(msg: impl Into<String>) -> Error {
    Error::Json(msg.into())
}

pub fn gr_to_json(x: &G) -> Value {
    Value::String(x.to_string())
}

pub fn gr_from_json(v: &Value) -> Result<G> {
    match v {
        Value::String(s) => parse_gr(s),
        Value::Number(n) if n.is_i64() => Ok(G::int(n.as_i64().unwrap())),
        _ => Err(jerr(format!("expected a rational string, found {}", v))),
    }
}

pub fn mat_to_json(m: &Mat) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(gr_to_json).collect())).collect())
}

/// Row-major matrix; `shape` fixes the size of matrices with a zero dimension.
pub fn mat_from_json(v: &Value, shape: Option<(usize, usize)>) -> Result<Mat> {
    let rows = v.as_array().ok_or_else(|| jerr("matrix must be an array of rows"))?;
    let mut out = Vec::new();
    for r in rows {
        let r = r.as_array().ok_or_else(|| jerr("matrix row must be an array"))?;
        out.push(r.iter().map(gr_from_json).collect::<Result<Vec<_>>>()?);
    }
    let c = out.first().map_or(0, |r| r.len());
    if out.iter().any(|r| r.len() != c) {
        return Err(jerr("ragged matrix"));
    }
    let m = if out.is_empty() || c == 0 {
        let (sr, sc) = shape.unwrap_or((out.len(), 0));
        if out.len() != sr && !out.is_empty() {
            return Err(jerr(format!("matrix has {} rows, expected {}", out.len(), sr)));
        }
        Mat::zeros(sr, sc)
    } else {
        Mat::from_rows(out)?
    };
    if let Some(s) = shape {
        if (m.rows(), m.cols()) != s {
            return Err(Error::Shape(format!("matrix is {}x{}, expected {}x{}", m.rows(), m.cols(), s.0, s.1)));
        }
    }
    Ok(m)
}

fn space_to_json(n: &Mat) -> Value {
    json!({"dim": n.rows(), "N": mat_to_json(n)})
}

fn space_from_json(v: &Value) -> Result<Mat> {
    let d = v.get("dim").and_then(Value::as_u64).ok_or_else(|| jerr("space needs an integer \"dim\""))? as usize;
    match v.get("N") {
        Some(n) => mat_from_json(n, Some((d, d))),
        None => Ok(Mat::zeros(d, d)),
    }
}

pub fn module_to_json(m: &VGradedModule) -> Value {
    let mut psi = Map::new();
    for (a, n) in &m.psi {
        psi.insert(a.0.to_string(), space_to_json(n));
    }
    json!({
        "alphas": m.alphas().iter().map(gr_to_json).collect::<Vec<_>>(),
        "psi": psi,
        "phi": space_to_json(&m.phi),
        "can": mat_to_json(&m.can),
        "var": mat_to_json(&m.var),
    })
}

/// Reads a module. Shapes are checked, the quiver axioms are not (see `VGradedModule::check`).
pub fn module_from_json(v: &Value) -> Result<VGradedModule> {
    let mut psi = BTreeMap::new();
    if let Some(p) = v.get("psi") {
        let p = p.as_object().ok_or_else(|| jerr("\"psi\" must be an object keyed by alpha"))?;
        for (k, s) in p {
            psi.insert(Cx(parse_gr(k)?), space_from_json(s)?);
        }
    }
    if let Some(al) = v.get("alphas") {
        let al = al.as_array().ok_or_else(|| jerr("\"alphas\" must be an array"))?;
        for a in al {
            let a = gr_from_json(a)?;
            if !psi.contains_key(&Cx(a.clone())) {
                return Err(jerr(format!("alpha {} listed without a psi entry", a)));
            }
        }
        if al.len() != psi.len() {
            return Err(jerr("\"alphas\" does not match the keys of \"psi\""));
        }
    }
    let phi = match v.get("phi") {
        Some(s) => space_from_json(s)?,
        None => Mat::zeros(0, 0),
    };
    let d = psi.get(&Cx(G::int(-1))).map_or(0, |n: &Mat| n.rows());
    let e = phi.rows();
    let can = match v.get("can") {
        Some(c) => mat_from_json(c, Some((e, d)))?,
        None => Mat::zeros(e, d),
    };
    let var = match v.get("var") {
        Some(c) => mat_from_json(c, Some((d, e)))?,
        None => Mat::zeros(d, e),
    };
    Ok(VGradedModule { psi, phi, can, var })
}

fn germs_to_json(g: &[Vec<Germ>]) -> Value {
    Value::Array(g.iter().map(|r| Value::Array(r.iter().map(|e| Value::String(e.to_string())).collect())).collect())
}

fn germs_from_json(v: &Value) -> Result<Vec<Vec<Germ>>> {
    let rows = v.as_array().ok_or_else(|| jerr("entries must be an array of rows"))?;
    let mut out = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array().ok_or_else(|| jerr("entries row must be an array"))?;
        let mut row = Vec::new();
        for (j, e) in r.iter().enumerate() {
            let s = e.as_str().ok_or_else(|| jerr(format!("entry [{}][{}] must be a germ string", i, j)))?;
            row.push(parse_germ(s).map_err(|e| jerr(format!("entry [{}][{}]: {}", i, j, e)))?);
        }
        out.push(row);
    }
    Ok(out)
}

/// Pairing file together with an optional stabilization parameter `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingFile {
    pub pairing: DistPairing,
    pub p: Option<usize>,
}

pub fn pairing_to_json(pf: &PairingFile) -> Value {
    let pr = &pf.pairing;
    let mut blocks = Map::new();
    for (a, g) in &pr.psi {
        blocks.insert(a.0.to_string(), germs_to_json(g));
    }
    let mut o = Map::new();
    o.insert("left".into(), module_to_json(&pr.left));
    o.insert("right".into(), module_to_json(&pr.right));
    o.insert("psi".into(), Value::Object(blocks));
    if let Some(g) = &pr.phi {
        o.insert("phi".into(), germs_to_json(g));
    }
    if let Some(p) = pf.p {
        o.insert("p".into(), json!(p));
    }
    Value::Object(o)
}

/// Accepts the full form `{"left", "right", "psi", "phi"?}` or the single block form
/// `{"alpha", "left_dim", "right_dim", "entries", "left_N"?, "right_N"?}`.
pub fn pairing_from_json(v: &Value) -> Result<PairingFile> {
    let p = match v.get("p") {
        Some(x) => Some(x.as_u64().ok_or_else(|| jerr("\"p\" must be a nonnegative integer"))? as usize),
        None => None,
    };
    let pairing = if v.get("alpha").is_some() {
        let alpha = gr_from_json(&v["alpha"])?;
        let dim = |k: &str| -> Result<usize> {
            v.get(k).and_then(Value::as_u64).map(|x| x as usize).ok_or_else(|| jerr(format!("missing integer \"{}\"", k)))
        };
        let (ld, rd) = (dim("left_dim")?, dim("right_dim")?);
        let nl = match v.get("left_N") {
            Some(n) => mat_from_json(n, Some((ld, ld)))?,
            None => Mat::zeros(ld, ld),
        };
        let nr = match v.get("right_N") {
            Some(n) => mat_from_json(n, Some((rd, rd)))?,
            None => Mat::zeros(rd, rd),
        };
        let entries = germs_from_json(v.get("entries").ok_or_else(|| jerr("missing \"entries\""))?)?;
        let mut psi = BTreeMap::new();
        psi.insert(Cx(alpha.clone()), entries);
        DistPairing {
            left: VGradedModule::single(alpha.clone(), nl),
            right: VGradedModule::single(alpha.conj(), nr),
            psi,
            phi: None,
        }
    } else {
        let left = module_from_json(v.get("left").ok_or_else(|| jerr("missing \"left\""))?)?;
        let right = module_from_json(v.get("right").ok_or_else(|| jerr("missing \"right\""))?)?;
        let mut psi = BTreeMap::new();
        if let Some(b) = v.get("psi") {
            let b = b.as_object().ok_or_else(|| jerr("\"psi\" must be an object keyed by alpha"))?;
            for (k, g) in b {
                psi.insert(Cx(parse_gr(k)?), germs_from_json(g)?);
            }
        }
        let phi = v.get("phi").map(germs_from_json).transpose()?;
        DistPairing { left, right, psi, phi }
    };
    pairing.validate()?;
    Ok(PairingFile { pairing, p })
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| jerr(e.to_string()))
}

pub fn to_text(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializing a json value")
}
