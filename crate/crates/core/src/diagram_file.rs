//! JSON diagram files and the built-in example gallery.
//!
//! ```json
//! {"kind": "stationary", "matrix": [[2,0],[2,4]], "depth": 8, "simple_hat": true,
//!  "order": {"level *": {"vertex 2": [1,2,2,2,2,1]}}}
//! ```
//!
//! `kind` is one of `stationary`, `explicit`, `dyadic`, `2x2-ers`, `infrank`, `enum-spine`,
//! `toeplitz-arbulu`. Orders list 1-based source vertices; `"level *"` applies to every level
//! from 2 on.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::diagram::{BratteliDiagram, Dyadic, InfRank, TwoByTwoErs};
use crate::enumeration::{expr_scale, linear_scale, spine_diagram};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::matrix::IntMatrix;
use crate::ordering::OrderedDiagram;
use crate::toeplitz::{arbulu_scheme, scheme_diagram};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramFile {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<Vec<u64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simple_hat: Option<bool>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Value>,
}

impl DiagramFile {
    fn new(kind: &str) -> Self {
        DiagramFile {
            kind: kind.into(),
            matrix: None,
            matrices: None,
            depth: None,
            simple_hat: None,
            params: BTreeMap::new(),
            order: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram files serialize")
    }

    fn depth(&self) -> Result<usize> {
        match self.depth {
            Some(d) if d >= 1 => Ok(d),
            _ => Err(Error::Parse(format!("kind {} needs a positive depth", self.kind))),
        }
    }

    fn param_str(&self, key: &str) -> Result<String> {
        match self.params.get(key) {
            Some(Value::String(s)) => Ok(s.clone()),
            Some(Value::Number(n)) => Ok(n.to_string()),
            _ => Err(Error::Parse(format!("missing parameter {key}"))),
        }
    }

    fn param_expr(&self, key: &str) -> Result<Expr> {
        Expr::parse(&self.param_str(key)?)
    }

    fn param_usize(&self, key: &str) -> Option<usize> {
        self.params.get(key).and_then(Value::as_u64).map(|x| x as usize)
    }

    pub fn build(&self) -> Result<OrderedDiagram> {
        let base = match self.kind.as_str() {
            "stationary" => {
                let m = self.matrix.as_ref().ok_or_else(|| Error::Parse("stationary needs matrix".into()))?;
                BratteliDiagram::stationary(&IntMatrix::from_u64(m)?, self.depth()?, self.simple_hat.unwrap_or(true))?
            }
            "explicit" => {
                let ms = self.matrices.as_ref().ok_or_else(|| Error::Parse("explicit needs matrices".into()))?;
                let inc = ms.iter().map(|m| IntMatrix::from_u64(m)).collect::<Result<Vec<_>>>()?;
                BratteliDiagram::new(inc, self.simple_hat.unwrap_or(false))?
            }
            "dyadic" => BratteliDiagram::from_generator(&Dyadic, self.depth()?)?,
            "2x2-ers" => {
                let g = TwoByTwoErs {
                    a: self.param_expr("a_n")?,
                    b: self.param_expr("b_n")?,
                    c: self.param_expr("c_n")?,
                    d: self.param_expr("d_n")?,
                };
                BratteliDiagram::from_generator(&g, self.depth()?)?
            }
            "infrank" => BratteliDiagram::from_generator(&InfRank { a: self.param_expr("a_n")? }, self.depth()?)?,
            "enum-spine" => return self.no_order().and_then(|_| self.build_spine()),
            "toeplitz-arbulu" => {
                self.no_order()?;
                let depth = self.depth()?;
                let conj = self.params.get("conjugate_odd").and_then(Value::as_bool).unwrap_or(true);
                let scheme = arbulu_scheme((depth - 1) as u32, conj)?;
                return scheme_diagram(&scheme);
            }
            other => return Err(Error::Parse(format!("unknown diagram kind {other}"))),
        };
        let maps = match &self.order {
            None => return Ok(OrderedDiagram::left_to_right(base)),
            Some(v) => parse_order(v, base.levels())?,
        };
        let default = OrderedDiagram::left_to_right(base.clone());
        let table: Vec<Option<Vec<Vec<usize>>>> = maps
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                m.map(|mut m| {
                    let words = default.words_at(i + 1);
                    (0..words.len()).map(|v| m.remove(&v).unwrap_or_else(|| words[v].clone())).collect()
                })
            })
            .collect();
        OrderedDiagram::with_explicit_order(base, &table)
    }

    fn no_order(&self) -> Result<()> {
        match &self.order {
            None => Ok(()),
            Some(Value::String(s)) if s == "left_to_right" => Ok(()),
            Some(_) => Err(Error::Parse(format!("kind {} fixes its own order", self.kind))),
        }
    }

    fn build_spine(&self) -> Result<OrderedDiagram> {
        let depth = self.depth()?;
        if let Some(d) = self.param_usize("d") {
            return spine_diagram(&linear_scale(d, depth + d + 1)?, depth);
        }
        let q = self.param_expr("Q")?;
        let limit = 4 * depth + 64;
        let k_max = (1..=limit as u64)
            .find(|&k| q.eval(k).map(|v| v >= (depth as i64).into()).unwrap_or(false))
            .ok_or_else(|| Error::BadKneadingMap(format!("Q(k) stays below {depth} for k <= {limit}")))?;
        spine_diagram(&expr_scale(&q, k_max as usize + 1)?, depth)
    }
}

fn parse_index(key: &str, prefix: &str) -> Result<usize> {
    key.strip_prefix(prefix)
        .and_then(|r| r.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::Parse(format!("bad order key {key:?}")))
}

/// Per-level maps from 0-based vertex to 0-based source list.
fn parse_order(v: &Value, levels: usize) -> Result<Vec<Option<BTreeMap<usize, Vec<usize>>>>> {
    if v.as_str() == Some("left_to_right") {
        return Ok(Vec::new());
    }
    let obj = v.as_object().ok_or_else(|| Error::Parse("order must be \"left_to_right\" or an object".into()))?;
    let mut table: Vec<Option<BTreeMap<usize, Vec<usize>>>> = vec![None; levels];
    let mut star = None;
    for (lk, vs) in obj {
        let verts = vs.as_object().ok_or_else(|| Error::Parse(format!("{lk}: expected vertex map")))?;
        let mut map = BTreeMap::new();
        for (vk, src) in verts {
            let v = parse_index(vk, "vertex")?;
            let list = src
                .as_array()
                .ok_or_else(|| Error::Parse(format!("{lk}/{vk}: expected source list")))?
                .iter()
                .map(|x| x.as_u64().filter(|&x| x >= 1).map(|x| x as usize - 1))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Parse(format!("{lk}/{vk}: sources are 1-based integers")))?;
            map.insert(v - 1, list);
        }
        if lk.trim() == "level *" {
            star = Some(map);
        } else {
            let n = parse_index(lk, "level")?;
            if n > levels {
                return Err(Error::LevelOutOfRange { level: n, max: levels });
            }
            table[n - 1] = Some(map);
        }
    }
    let mut out = Vec::with_capacity(levels);
    for (i, entry) in table.into_iter().enumerate() {
        out.push(entry.or_else(|| (i >= 1).then(|| star.clone()).flatten()));
    }
    Ok(out)
}

/// Thm 5.1 family `F = [[2, 0], [p, q]]` with the order `1 2^q 1^(p-1)` at vertex 2.
pub fn nonsimple_family(p: u64, q: u64, depth: usize) -> DiagramFile {
    let mut word = vec![1u64];
    word.extend(std::iter::repeat_n(2, q as usize));
    word.extend(std::iter::repeat_n(1, p as usize - 1));
    let mut f = DiagramFile::new("stationary");
    f.matrix = Some(vec![vec![2, 0], vec![p, q]]);
    f.depth = Some(depth);
    f.simple_hat = Some(true);
    f.order = Some(serde_json::json!({ "level *": { "vertex 1": [1, 1], "vertex 2": word } }));
    f
}

/// Named example diagrams.
pub fn gallery() -> Vec<(String, DiagramFile)> {
    let mut out = Vec::new();

    let mut fig1 = DiagramFile::new("explicit");
    fig1.matrices = Some(vec![vec![vec![1]; 4], vec![vec![4, 2, 2, 1]]]);
    fig1.simple_hat = Some(true);
    fig1.order = Some(serde_json::json!({ "level 2": { "vertex 1": [2, 2, 1, 1, 1, 1, 3, 3, 4] } }));
    out.push(("fig1-consecutive".to_string(), fig1));

    out.push(("fig2-nonconsecutive".to_string(), nonsimple_family(2, 4, 8)));
    for (p, q) in [(1, 3), (2, 4), (3, 5)] {
        out.push((format!("nonsimple-p{p}-q{q}"), nonsimple_family(p, q, 10)));
    }

    let mut arb = DiagramFile::new("toeplitz-arbulu");
    arb.depth = Some(3);
    arb.params.insert("conjugate_odd".into(), Value::Bool(true));
    out.push(("toeplitz-arbulu".to_string(), arb));

    let mut inf = DiagramFile::new("infrank");
    inf.depth = Some(8);
    inf.params.insert("a_n".into(), Value::String("n^3".into()));
    out.push(("infrank-n3".to_string(), inf));

    let mut sym = DiagramFile::new("2x2-ers");
    sym.depth = Some(8);
    for (k, v) in [("a_n", "n^2"), ("b_n", "n"), ("c_n", "n"), ("d_n", "n^2")] {
        sym.params.insert(k.into(), Value::String(v.into()));
    }
    out.push(("symmetric-2x2".to_string(), sym));

    let mut dy = DiagramFile::new("dyadic");
    dy.depth = Some(12);
    out.push(("dyadic".to_string(), dy));

    for d in 1..=5u64 {
        let mut sp = DiagramFile::new("enum-spine");
        sp.depth = Some(24);
        sp.params.insert("d".into(), Value::from(d));
        out.push((format!("spine-d{d}"), sp));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::word_string;

    #[test]
    fn roundtrip_and_orders() {
        for (name, f) in gallery() {
            let back = DiagramFile::parse(&f.to_json()).unwrap();
            assert_eq!(back, f, "{name}");
            back.build().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        let (_, fig1) = &gallery()[0];
        assert_eq!(word_string(fig1.build().unwrap().word(2, 0)), "221111334");
        let fig2 = nonsimple_family(2, 4, 5).build().unwrap();
        assert_eq!(word_string(fig2.word(3, 1)), "122221");
        assert!(!fig2.is_consecutive(None).unwrap());
    }

    #[test]
    fn structure_reports() {
        let g: BTreeMap<String, DiagramFile> = gallery().into_iter().collect();
        assert!(g["infrank-n3"].build().unwrap().base().structure_report().ers.is_some());
        let sym = g["symmetric-2x2"].build().unwrap().base().structure_report();
        assert!(sym.ers.is_some() && sym.ecs.is_some());
        assert!(g["fig2-nonconsecutive"].build().unwrap().base().structure_report().ers.is_none());
    }

    #[test]
    fn rejects_unknown_kind() {
        assert!(DiagramFile::parse(r#"{"kind":"nope","depth":2}"#).unwrap().build().is_err());
        assert!(DiagramFile::parse("{").is_err());
    }
}
