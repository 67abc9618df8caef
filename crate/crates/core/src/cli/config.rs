//! Scene files: TOML with numeric fields given as numbers or expression strings
//! (`"phi - 1"`, `"sqrt(5)"`, `"pi"`), validated into a [`SceneConfig`] before any
//! computation.

use std::fmt;

use evalexpr::{ContextWithMutableFunctions, ContextWithMutableVariables, DefaultNumericTypes, Function, HashMapContext, Value as EValue};
use num_complex::Complex64;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::cps::{golden_ratio, CutProjectScheme, WeightFunction, Window};
use crate::group::{FiniteHaar, GroupDescriptor, RegionBox};
use crate::lattice::EuclideanLattice;
use crate::measure::{Coset, SymbolicComb, TrigPoly};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error at line {}: `{}`: {}", self.line, self.key, self.message)
    }
}

type CResult<T> = std::result::Result<T, ConfigError>;

/// What the scene describes.
#[derive(Debug, Clone)]
pub enum Source {
    Comb { comb: SymbolicComb, window: Option<Window> },
    Points(Vec<Vec<f64>>),
}

/// How frequencies are chosen for `fb` and `diffract`.
#[derive(Debug, Clone, PartialEq)]
pub enum Candidates {
    /// Dual-scheme projections (model combs) or the exact support (other combs).
    Structural,
    /// A uniform grid of the given spacing over the frequency window.
    Grid(f64),
    Explicit(Vec<Vec<f64>>),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub region: RegionBox,
    pub vh_scale: f64,
    pub vh_n: usize,
    pub n_list: Vec<usize>,
    pub thresholds: Vec<f64>,
    pub tol: f64,
    pub frequency_window: RegionBox,
    pub candidates: Candidates,
    pub star_radius: f64,
    pub coefficient_threshold: f64,
    pub intensity_threshold: f64,
    pub autocorr_radius: f64,
    pub k_box: RegionBox,
    pub meyer_radius: Option<f64>,
    pub meyer_tol: f64,
    pub structure_tol: f64,
    pub translate_cap: usize,
    pub require_structure: bool,
    pub scan: bool,
}

#[derive(Debug, Clone)]
pub struct SceneConfig {
    pub source: Source,
    pub run: RunConfig,
    pub out_dir: Option<String>,
    pub stem: String,
    pub sha256: String,
}

impl SceneConfig {
    pub fn dim(&self) -> usize {
        self.run.region.dim()
    }
}

struct Parser<'a> {
    src: &'a str,
    ctx: HashMapContext<DefaultNumericTypes>,
}

pub fn parse_scene(src: &str, default_stem: &str) -> CResult<SceneConfig> {
    let table: Table = src.parse().map_err(|e: toml::de::Error| ConfigError {
        line: e.span().map(|s| line_of(src, s.start)).unwrap_or(1),
        key: "<syntax>".into(),
        message: e.message().to_string(),
    })?;
    let p = Parser::new(src);
    p.scene(&table, default_stem)
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// Appends `.0` to bare integer literals so that `1/2` divides as reals.
fn floatify(expr: &str) -> String {
    let chars: Vec<char> = expr.chars().collect();
    let mut out = String::with_capacity(expr.len() + 8);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let prev_ident = i > 0 && (chars[i - 1].is_alphanumeric() || chars[i - 1] == '_' || chars[i - 1] == '.');
        if c.is_ascii_digit() && !prev_ident {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.extend(&chars[start..i]);
            let next = chars.get(i).copied();
            if !matches!(next, Some('.') | Some('e') | Some('E')) {
                out.push_str(".0");
            }
            continue;
        }
        out.push(c);
        i += 1;
    }
    out
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
        let consts = [
            ("phi", golden_ratio()),
            ("pi", std::f64::consts::PI),
            ("e", std::f64::consts::E),
            ("inf", f64::INFINITY),
            ("infinity", f64::INFINITY),
        ];
        for (k, v) in consts {
            ctx.set_value(k.into(), EValue::Float(v)).expect("fresh context accepts constants");
        }
        ctx.set_function(
            "sqrt".into(),
            Function::new(|arg: &EValue<DefaultNumericTypes>| Ok(EValue::Float(arg.as_number()?.sqrt()))),
        )
        .expect("fresh context accepts functions");
        Parser { src, ctx }
    }

    /// Line of the key at `path` (dotted), falling back to its table header or line 1.
    fn locate(&self, path: &str) -> usize {
        let parts: Vec<&str> = path.split('.').filter(|s| !s.parse::<usize>().is_ok()).collect();
        let mut header: Vec<String> = Vec::new();
        let mut best = (0usize, 1usize);
        for (i, raw) in self.src.lines().enumerate() {
            let line = raw.trim();
            if line.starts_with('[') {
                let name = line.trim_start_matches('[').split(']').next().unwrap_or("").trim();
                header = name.split('.').map(|s| s.trim().to_string()).collect();
                if header.len() <= parts.len() && header.iter().zip(&parts).all(|(a, b)| a == b) && header.len() > best.0 {
                    best = (header.len(), i + 1);
                }
                continue;
            }
            let Some((key, _)) = line.split_once('=') else { continue };
            let key = key.trim().trim_matches('"');
            let depth = header.len();
            if depth < parts.len() && header.iter().zip(&parts).all(|(a, b)| a == b) && parts[depth] == key && depth + 1 > best.0 {
                best = (depth + 1, i + 1);
            }
        }
        best.1
    }

    fn err<T>(&self, path: &str, message: impl Into<String>) -> CResult<T> {
        Err(ConfigError { line: self.locate(path), key: path.to_string(), message: message.into() })
    }

    fn num(&self, v: &Value, path: &str) -> CResult<f64> {
        let x = match v {
            Value::Integer(i) => *i as f64,
            Value::Float(f) => *f,
            Value::String(s) => match evalexpr::eval_number_with_context(&floatify(s), &self.ctx) {
                Ok(x) => x,
                Err(e) => return self.err(path, format!("cannot evaluate `{s}`: {e}")),
            },
            other => return self.err(path, format!("expected a number or expression, found {}", other.type_str())),
        };
        if x.is_nan() {
            return self.err(path, "value is not a number");
        }
        Ok(x)
    }

    fn finite(&self, v: &Value, path: &str) -> CResult<f64> {
        let x = self.num(v, path)?;
        if !x.is_finite() {
            return self.err(path, "value must be finite (unbounded values are not allowed)");
        }
        Ok(x)
    }

    fn positive(&self, v: &Value, path: &str) -> CResult<f64> {
        let x = self.finite(v, path)?;
        if x <= 0.0 {
            return self.err(path, format!("value must be positive, got {x}"));
        }
        Ok(x)
    }

    fn uint(&self, v: &Value, path: &str) -> CResult<u64> {
        match v {
            Value::Integer(i) if *i >= 0 => Ok(*i as u64),
            _ => self.err(path, "expected a non-negative integer"),
        }
    }

    fn int(&self, v: &Value, path: &str) -> CResult<i64> {
        match v {
            Value::Integer(i) => Ok(*i),
            _ => {
                let x = self.finite(v, path)?;
                if x.fract() != 0.0 {
                    return self.err(path, format!("expected an integer, got {x}"));
                }
                Ok(x as i64)
            }
        }
    }

    fn array<'v>(&self, v: &'v Value, path: &str) -> CResult<&'v Vec<Value>> {
        match v {
            Value::Array(a) => Ok(a),
            _ => self.err(path, "expected an array"),
        }
    }

    fn table<'v>(&self, v: &'v Value, path: &str) -> CResult<&'v Table> {
        match v {
            Value::Table(t) => Ok(t),
            _ => self.err(path, "expected a table"),
        }
    }

    fn string<'v>(&self, v: &'v Value, path: &str) -> CResult<&'v str> {
        match v {
            Value::String(s) => Ok(s),
            _ => self.err(path, "expected a string"),
        }
    }

    fn bool(&self, v: &Value, path: &str) -> CResult<bool> {
        match v {
            Value::Boolean(b) => Ok(*b),
            _ => self.err(path, "expected true or false"),
        }
    }

    fn vector(&self, v: &Value, path: &str) -> CResult<Vec<f64>> {
        self.array(v, path)?.iter().enumerate().map(|(i, x)| self.finite(x, &format!("{path}.{i}"))).collect()
    }

    /// A list of vectors; a bare number list is read as a list of one-dimensional vectors.
    fn vectors(&self, v: &Value, path: &str) -> CResult<Vec<Vec<f64>>> {
        self.array(v, path)?
            .iter()
            .enumerate()
            .map(|(i, x)| match x {
                Value::Array(_) => self.vector(x, &format!("{path}.{i}")),
                _ => Ok(vec![self.finite(x, &format!("{path}.{i}"))?]),
            })
            .collect()
    }

    fn matrix(&self, v: &Value, path: &str) -> CResult<Vec<Vec<f64>>> {
        let rows: Vec<Vec<f64>> = self
            .array(v, path)?
            .iter()
            .enumerate()
            .map(|(i, r)| self.vector(r, &format!("{path}.{i}")))
            .collect::<CResult<_>>()?;
        if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
            return self.err(path, "expected a non-empty square matrix given by rows");
        }
        Ok(rows)
    }

    fn complex(&self, v: &Value, path: &str) -> CResult<Complex64> {
        match v {
            Value::Table(t) => {
                let re = t.get("re").map(|x| self.finite(x, &format!("{path}.re"))).transpose()?.unwrap_or(0.0);
                let im = t.get("im").map(|x| self.finite(x, &format!("{path}.im"))).transpose()?.unwrap_or(0.0);
                Ok(Complex64::new(re, im))
            }
            Value::Array(a) if a.len() == 2 => Ok(Complex64::new(self.finite(&a[0], &format!("{path}.0"))?, self.finite(&a[1], &format!("{path}.1"))?)),
            _ => Ok(Complex64::new(self.finite(v, path)?, 0.0)),
        }
    }

    /// `{lo = [...], hi = [...]}`, `{radius = r}` (with `dim`) or `{center = [...], radius = r}`.
    fn region(&self, v: &Value, path: &str, dim: Option<usize>) -> CResult<RegionBox> {
        let t = self.table(v, path)?;
        let b = if let (Some(lo), Some(hi)) = (t.get("lo"), t.get("hi")) {
            let lo = self.bounded_vector(lo, &format!("{path}.lo"))?;
            let hi = self.bounded_vector(hi, &format!("{path}.hi"))?;
            if lo.len() != hi.len() {
                return self.err(path, "lo and hi differ in dimension");
            }
            RegionBox { lo, hi, finite: Default::default() }
        } else if let Some(r) = t.get("radius") {
            let r = self.positive(r, &format!("{path}.radius"))?;
            let centre = match t.get("center") {
                Some(c) => self.vector(c, &format!("{path}.center"))?,
                None => match dim {
                    Some(d) => vec![0.0; d],
                    None => return self.err(path, "a radius needs `center` or a known dimension"),
                },
            };
            RegionBox { lo: centre.iter().map(|c| c - r).collect(), hi: centre.iter().map(|c| c + r).collect(), finite: Default::default() }
        } else {
            return self.err(path, "expected `lo` and `hi`, or `radius`");
        };
        if let Some(d) = dim {
            if b.dim() != d {
                return self.err(path, format!("region has dimension {}, expected {d}", b.dim()));
            }
        }
        for i in 0..b.dim() {
            if b.hi[i] < b.lo[i] {
                return self.err(path, format!("hi < lo along axis {i}"));
            }
        }
        Ok(b)
    }

    fn bounded_vector(&self, v: &Value, path: &str) -> CResult<Vec<f64>> {
        let items = self.array(v, path)?;
        let mut out = Vec::with_capacity(items.len());
        for (i, x) in items.iter().enumerate() {
            let y = self.num(x, &format!("{path}.{i}"))?;
            if !y.is_finite() {
                return self.err(path, format!("region is unbounded (component {i} is {y})"));
            }
            out.push(y);
        }
        Ok(out)
    }

    fn scene(&self, root: &Table, default_stem: &str) -> CResult<SceneConfig> {
        for key in root.keys() {
            if !matches!(key.as_str(), "group" | "cps" | "comb" | "points" | "run" | "output") {
                return self.err(key, "unknown block");
            }
        }
        let present: Vec<&str> = ["cps", "comb", "points"].into_iter().filter(|k| root.contains_key(*k)).collect();
        if present.len() != 1 {
            return self.err(present.get(1).copied().unwrap_or("cps"), "exactly one of [cps], [comb] or [points] is required");
        }
        let run_t = match root.get("run") {
            Some(v) => self.table(v, "run")?.clone(),
            None => Table::new(),
        };

        let (source, dim) = match present[0] {
            "cps" => {
                let (comb, window) = self.cps(self.table(&root["cps"], "cps")?)?;
                let d = comb.dim();
                (Source::Comb { comb, window }, d)
            }
            "comb" => {
                let comb = self.comb(self.table(&root["comb"], "comb")?)?;
                let d = comb.dim();
                (Source::Comb { comb, window: None }, d)
            }
            _ => {
                let pts = self.points(self.table(&root["points"], "points")?)?;
                let d = pts.first().map(|p| p.len()).unwrap_or(1);
                (Source::Points(pts), d)
            }
        };
        if let Some(g) = root.get("group") {
            self.group(self.table(g, "group")?, &source, dim)?;
        }
        let run = self.run(&run_t, dim)?;
        if let Source::Points(pts) = &source {
            if let Some(i) = pts.iter().position(|p| p.len() != dim) {
                return self.err(&format!("points.positions.{i}"), "point dimensions differ");
            }
        }
        let (out_dir, stem) = match root.get("output") {
            Some(v) => {
                let t = self.table(v, "output")?;
                let dir = t.get("dir").map(|d| self.string(d, "output.dir").map(str::to_string)).transpose()?;
                let stem = t.get("stem").map(|d| self.string(d, "output.stem").map(str::to_string)).transpose()?;
                (dir, stem.unwrap_or_else(|| default_stem.to_string()))
            }
            None => (None, default_stem.to_string()),
        };
        Ok(SceneConfig { source, run, out_dir, stem, sha256: hex::encode(Sha256::digest(self.src.as_bytes())) })
    }

    fn group(&self, t: &Table, source: &Source, dim: usize) -> CResult<()> {
        if let Some(v) = t.get("physical_dim") {
            let d = self.uint(v, "group.physical_dim")? as usize;
            if d != dim {
                return self.err("group.physical_dim", format!("scene lives in dimension {dim}, not {d}"));
            }
        }
        if let Source::Comb { comb: SymbolicComb::Model(m), .. } = source {
            let internal = m.cps.internal();
            if let Some(v) = t.get("internal_dim") {
                if self.uint(v, "group.internal_dim")? as usize != internal.euclidean_dim {
                    return self.err("group.internal_dim", "does not match the [cps] block");
                }
            }
            if let Some(v) = t.get("cyclic_orders") {
                let o: Vec<u64> = self.array(v, "group.cyclic_orders")?.iter().map(|x| self.uint(x, "group.cyclic_orders")).collect::<CResult<_>>()?;
                if o != internal.cyclic_orders {
                    return self.err("group.cyclic_orders", "does not match the [cps] block");
                }
            }
        }
        Ok(())
    }

    fn cps(&self, t: &Table) -> CResult<(SymbolicComb, Option<Window>)> {
        let kind = t.get("kind").map(|v| self.string(v, "cps.kind")).transpose()?.unwrap_or("euclidean");
        let cps = match kind {
            "fibonacci" => CutProjectScheme::fibonacci(),
            "euclidean" => {
                let rows = self.matrix(t.get("basis_rows").ok_or_else(|| self.missing("cps.basis_rows"))?, "cps.basis_rows")?;
                let d = self.uint(t.get("physical_dim").ok_or_else(|| self.missing("cps.physical_dim"))?, "cps.physical_dim")? as usize;
                if d == 0 || d >= rows.len() {
                    return self.err("cps.physical_dim", format!("needs 1 ≤ d < {}", rows.len()));
                }
                let lattice = EuclideanLattice::from_rows(&rows).or_else(|e| self.err("cps.basis_rows", e.to_string()))?;
                CutProjectScheme::euclidean(d, lattice).or_else(|e| self.err("cps.basis_rows", e.to_string()))?
            }
            "finite" => {
                let rows = self.matrix(t.get("base_rows").ok_or_else(|| self.missing("cps.base_rows"))?, "cps.base_rows")?;
                let base = EuclideanLattice::from_rows(&rows).or_else(|e| self.err("cps.base_rows", e.to_string()))?;
                let orders: Vec<u64> = self
                    .array(t.get("orders").ok_or_else(|| self.missing("cps.orders"))?, "cps.orders")?
                    .iter()
                    .map(|x| self.uint(x, "cps.orders"))
                    .collect::<CResult<_>>()?;
                let images: Vec<Vec<u64>> = self
                    .array(t.get("images").ok_or_else(|| self.missing("cps.images"))?, "cps.images")?
                    .iter()
                    .enumerate()
                    .map(|(i, r)| self.array(r, &format!("cps.images.{i}"))?.iter().map(|x| self.uint(x, "cps.images")).collect())
                    .collect::<CResult<_>>()?;
                let internal = GroupDescriptor::finite(orders).or_else(|e| self.err("cps.orders", e.to_string()))?;
                CutProjectScheme::finite(base, internal, images).or_else(|e| self.err("cps.images", e.to_string()))?
            }
            other => return self.err("cps.kind", format!("unknown scheme kind `{other}` (euclidean, finite, fibonacci)")),
        };
        let window = match t.get("window") {
            Some(w) => Some(self.window(self.table(w, "cps.window")?, &cps)?),
            None => None,
        };
        let weight = match t.get("weight") {
            Some(w) => self.weight(self.table(w, "cps.weight")?, &cps, window.as_ref())?,
            None => match &window {
                Some(w) => WeightFunction::indicator(w.clone()),
                None => return self.err("cps", "needs a [cps.window] or a [cps.weight]"),
            },
        };
        let mut comb = SymbolicComb::model(cps, weight).or_else(|e| self.err("cps.weight", e.to_string()))?;
        if let Some(v) = t.get("amplitude") {
            if let SymbolicComb::Model(m) = &mut comb {
                m.amplitude = self.complex(v, "cps.amplitude")?;
            }
        }
        if let Some(v) = t.get("translate") {
            let tv = self.vector(v, "cps.translate")?;
            if tv.len() != comb.dim() {
                return self.err("cps.translate", "dimension mismatch");
            }
            comb = comb.translate(&tv).or_else(|e| self.err("cps.translate", e.to_string()))?;
        }
        Ok((comb, window))
    }

    fn missing(&self, path: &str) -> ConfigError {
        let parent = path.rsplit_once('.').map(|p| p.0).unwrap_or(path);
        ConfigError { line: self.locate(parent), key: path.into(), message: "required key is missing".into() }
    }

    fn window(&self, t: &Table, cps: &CutProjectScheme) -> CResult<Window> {
        let kind = t.get("kind").map(|v| self.string(v, "cps.window.kind")).transpose()?.unwrap_or("interval");
        let w = match kind {
            "interval" => {
                let lo = self.num(t.get("lo").ok_or_else(|| self.missing("cps.window.lo"))?, "cps.window.lo")?;
                let hi = self.num(t.get("hi").ok_or_else(|| self.missing("cps.window.hi"))?, "cps.window.hi")?;
                Window::interval(lo, hi).or_else(|e| self.err("cps.window", e.to_string()))?
            }
            "boxes" => {
                let items = self.array(t.get("boxes").ok_or_else(|| self.missing("cps.window.boxes"))?, "cps.window.boxes")?;
                let boxes = items
                    .iter()
                    .enumerate()
                    .map(|(i, b)| self.region(b, &format!("cps.window.boxes.{i}"), None))
                    .collect::<CResult<Vec<_>>>()?;
                Window::boxes(boxes).or_else(|e| self.err("cps.window.boxes", e.to_string()))?
            }
            "subset" => {
                let members: Vec<Vec<u64>> = self
                    .array(t.get("members").ok_or_else(|| self.missing("cps.window.members"))?, "cps.window.members")?
                    .iter()
                    .enumerate()
                    .map(|(i, r)| match r {
                        Value::Array(a) => a.iter().map(|x| self.uint(x, &format!("cps.window.members.{i}"))).collect(),
                        _ => Ok(vec![self.uint(r, &format!("cps.window.members.{i}"))?]),
                    })
                    .collect::<CResult<_>>()?;
                Window::subset(cps.internal().cyclic_orders.clone(), members).or_else(|e| self.err("cps.window.members", e.to_string()))?
            }
            other => return self.err("cps.window.kind", format!("unknown window kind `{other}` (interval, boxes, subset)")),
        };
        w.check_against(cps.internal()).or_else(|e| self.err("cps.window", e.to_string()))?;
        Ok(w)
    }

    fn weight(&self, t: &Table, cps: &CutProjectScheme, window: Option<&Window>) -> CResult<WeightFunction> {
        let kind = t.get("kind").map(|v| self.string(v, "cps.weight.kind")).transpose()?.unwrap_or("indicator");
        let w = match kind {
            "indicator" => match window {
                Some(w) => WeightFunction::indicator(w.clone()),
                None => return self.err("cps.weight", "an indicator weight needs [cps.window]"),
            },
            "tent" => {
                let lo = self.finite(t.get("lo").ok_or_else(|| self.missing("cps.weight.lo"))?, "cps.weight.lo")?;
                let hi = self.finite(t.get("hi").ok_or_else(|| self.missing("cps.weight.hi"))?, "cps.weight.hi")?;
                WeightFunction::tent(lo, hi).or_else(|e| self.err("cps.weight", e.to_string()))?
            }
            "table" => {
                let values = self
                    .array(t.get("values").ok_or_else(|| self.missing("cps.weight.values"))?, "cps.weight.values")?
                    .iter()
                    .enumerate()
                    .map(|(i, v)| self.complex(v, &format!("cps.weight.values.{i}")))
                    .collect::<CResult<Vec<_>>>()?;
                let haar = match t.get("haar").map(|v| self.string(v, "cps.weight.haar")).transpose()?.unwrap_or("normalized") {
                    "normalized" => FiniteHaar::Normalized,
                    "counting" => FiniteHaar::Counting,
                    other => return self.err("cps.weight.haar", format!("unknown Haar normalization `{other}`")),
                };
                WeightFunction::table(cps.internal().cyclic_orders.clone(), haar, values).or_else(|e| self.err("cps.weight.values", e.to_string()))?
            }
            other => return self.err("cps.weight.kind", format!("unknown weight kind `{other}` (indicator, tent, table)")),
        };
        w.check_against(cps.internal()).or_else(|e| self.err("cps.weight", e.to_string()))?;
        Ok(w)
    }

    fn comb(&self, t: &Table) -> CResult<SymbolicComb> {
        let kind = t.get("kind").map(|v| self.string(v, "comb.kind")).transpose()?.unwrap_or("lattice");
        let rows = self.matrix(t.get("basis_rows").ok_or_else(|| self.missing("comb.basis_rows"))?, "comb.basis_rows")?;
        let lattice = EuclideanLattice::from_rows(&rows).or_else(|e| self.err("comb.basis_rows", e.to_string()))?;
        let d = lattice.dim();
        let mut comb = match kind {
            "lattice" => {
                let amp = t.get("amplitude").map(|v| self.complex(v, "comb.amplitude")).transpose()?.unwrap_or(Complex64::new(1.0, 0.0));
                SymbolicComb::lattice(lattice, amp)
            }
            "cryst" => {
                let items = self.array(t.get("cosets").ok_or_else(|| self.missing("comb.cosets"))?, "comb.cosets")?;
                let mut cosets = Vec::with_capacity(items.len());
                for (i, c) in items.iter().enumerate() {
                    let path = format!("comb.cosets.{i}");
                    let ct = self.table(c, &path)?;
                    let tr = self.vector(ct.get("translate").ok_or_else(|| self.missing(&format!("{path}.translate")))?, &format!("{path}.translate"))?;
                    if tr.len() != d {
                        return self.err("comb.cosets.translate", format!("translate {i} has dimension {}, expected {d}", tr.len()));
                    }
                    let terms = self.array(ct.get("terms").ok_or_else(|| self.missing(&format!("{path}.terms")))?, &format!("{path}.terms"))?;
                    let mut poly = Vec::with_capacity(terms.len());
                    for (j, term) in terms.iter().enumerate() {
                        let tp = format!("{path}.terms.{j}");
                        let tt = self.table(term, &tp)?;
                        let freq = match tt.get("freq") {
                            Some(f) => self.vector(f, &format!("{tp}.freq"))?,
                            None => vec![0.0; d],
                        };
                        if freq.len() != d {
                            return self.err("comb.cosets.terms", format!("frequency of term {j} in coset {i} has the wrong dimension"));
                        }
                        let re = tt.get("re").map(|v| self.finite(v, &format!("{tp}.re"))).transpose()?.unwrap_or(0.0);
                        let im = tt.get("im").map(|v| self.finite(v, &format!("{tp}.im"))).transpose()?.unwrap_or(0.0);
                        poly.push((freq, Complex64::new(re, im)));
                    }
                    cosets.push(Coset { translate: tr, poly: TrigPoly::new(poly) });
                }
                SymbolicComb::cryst(lattice, cosets).or_else(|e| self.err("comb.cosets", e.to_string()))?
            }
            other => return self.err("comb.kind", format!("unknown comb kind `{other}` (lattice, cryst)")),
        };
        if let Some(v) = t.get("translate") {
            let tv = self.vector(v, "comb.translate")?;
            if tv.len() != d {
                return self.err("comb.translate", "dimension mismatch");
            }
            comb = comb.translate(&tv).or_else(|e| self.err("comb.translate", e.to_string()))?;
        }
        Ok(comb)
    }

    /// Explicit `positions`, or `formula` in `n` and `k` over `n ∈ n_range`,
    /// `k ∈ k_range` (bounds may use `n`).
    fn points(&self, t: &Table) -> CResult<Vec<Vec<f64>>> {
        if let Some(v) = t.get("positions") {
            let pts = self.vectors(v, "points.positions")?;
            if pts.is_empty() {
                return self.err("points.positions", "no points given");
            }
            return Ok(pts);
        }
        let Some(f) = t.get("formula") else {
            return self.err("points", "needs `positions` or `formula`");
        };
        let formula = floatify(self.string(f, "points.formula")?);
        let range = |key: &str| -> CResult<(Value, Value)> {
            let path = format!("points.{key}");
            let a = self.array(t.get(key).ok_or_else(|| self.missing(&path))?, &path)?;
            if a.len() != 2 {
                return self.err(&path, "expected [first, last]");
            }
            Ok((a[0].clone(), a[1].clone()))
        };
        let (n0, n1) = range("n_range")?;
        let (n0, n1) = (self.int(&n0, "points.n_range")?, self.int(&n1, "points.n_range")?);
        let (k0, k1) = match t.get("k_range") {
            Some(_) => range("k_range")?,
            None => (Value::Integer(0), Value::Integer(0)),
        };
        if n1 < n0 || n1 - n0 > 1_000_000 {
            return self.err("points.n_range", "empty or too long range");
        }
        let mut out = Vec::new();
        for n in n0..=n1 {
            let mut ctx = self.ctx.clone();
            ctx.set_value("n".into(), EValue::Float(n as f64)).expect("mutable context");
            let bound = |v: &Value| -> CResult<i64> {
                match v {
                    Value::String(s) => match evalexpr::eval_number_with_context(&floatify(s), &ctx) {
                        Ok(x) if x.is_finite() => Ok(x.round() as i64),
                        Ok(x) => self.err("points.k_range", format!("bound evaluates to {x}")),
                        Err(e) => self.err("points.k_range", format!("cannot evaluate `{s}`: {e}")),
                    },
                    _ => self.int(v, "points.k_range"),
                }
            };
            let (a, b) = (bound(&k0)?, bound(&k1)?);
            for k in a..=b {
                let mut c = ctx.clone();
                c.set_value("k".into(), EValue::Float(k as f64)).expect("mutable context");
                match evalexpr::eval_number_with_context(&formula, &c) {
                    Ok(x) if x.is_finite() => out.push(vec![x]),
                    Ok(x) => return self.err("points.formula", format!("evaluates to {x} at n = {n}, k = {k}")),
                    Err(e) => return self.err("points.formula", format!("cannot evaluate at n = {n}, k = {k}: {e}")),
                }
            }
        }
        if out.is_empty() {
            return self.err("points", "the formula produced no points");
        }
        Ok(out)
    }

    fn run(&self, t: &Table, dim: usize) -> CResult<RunConfig> {
        let get = |k: &str| t.get(k);
        let region = match get("region") {
            Some(v) => self.region(v, "run.region", Some(dim))?,
            None => return self.err("run.region", "required key is missing"),
        };
        let vh_scale = get("vh_scale").map(|v| self.positive(v, "run.vh_scale")).transpose()?.unwrap_or(1.0);
        let vh_n = get("vh_n").map(|v| self.uint(v, "run.vh_n")).transpose()?.map(|n| n as usize);
        let n_list: Vec<usize> = match get("n_list") {
            Some(v) => self.array(v, "run.n_list")?.iter().map(|x| self.uint(x, "run.n_list").map(|n| n as usize)).collect::<CResult<_>>()?,
            None => Vec::new(),
        };
        if n_list.contains(&0) || n_list.windows(2).any(|w| w[1] <= w[0]) {
            return self.err("run.n_list", "van Hove indices must be positive and increasing");
        }
        let vh_n = match vh_n {
            Some(0) => return self.err("run.vh_n", "must be positive"),
            Some(n) => n,
            None => n_list.last().copied().unwrap_or_else(|| {
                let half = (0..dim).map(|i| region.side(i) / 2.0).fold(f64::INFINITY, f64::min);
                ((half / vh_scale).floor() as usize).max(1)
            }),
        };
        let n_list = if n_list.is_empty() { vec![vh_n] } else { n_list };
        let thresholds = match get("thresholds") {
            Some(v) => {
                let th = self.vector(v, "run.thresholds")?;
                if th.iter().any(|x| *x <= 0.0) {
                    return self.err("run.thresholds", "thresholds must be positive");
                }
                th
            }
            None => vec![0.3, 0.1, 0.03, 0.01],
        };
        let frequency_window = match get("frequency_window") {
            Some(v) => self.region(v, "run.frequency_window", Some(dim))?,
            None => RegionBox { lo: vec![-2.0; dim], hi: vec![2.0; dim], finite: Default::default() },
        };
        let candidates = match get("candidates") {
            None => Candidates::Structural,
            Some(Value::String(s)) if s == "structural" || s == "dual" || s == "exact" => Candidates::Structural,
            Some(Value::String(s)) if s == "grid" => {
                let step = get("grid_step").map(|v| self.positive(v, "run.grid_step")).transpose()?.unwrap_or(0.01);
                Candidates::Grid(step)
            }
            Some(Value::Array(_)) => {
                let v = self.vectors(&t["candidates"], "run.candidates")?;
                if v.iter().any(|f| f.len() != dim) {
                    return self.err("run.candidates", format!("frequencies must have dimension {dim}"));
                }
                Candidates::Explicit(v)
            }
            Some(_) => return self.err("run.candidates", "expected \"structural\", \"grid\" or a list of frequencies"),
        };
        let opt_pos = |k: &str, default: f64| -> CResult<f64> {
            get(k).map(|v| self.positive(v, &format!("run.{k}"))).transpose().map(|x| x.unwrap_or(default))
        };
        let k_box = match get("k_box") {
            Some(v) => self.region(v, "run.k_box", Some(dim))?,
            None => RegionBox { lo: vec![0.0; dim], hi: vec![1.0; dim], finite: Default::default() },
        };
        Ok(RunConfig {
            vh_scale,
            vh_n,
            n_list,
            thresholds,
            tol: opt_pos("tol", 1e-2)?,
            frequency_window,
            candidates,
            star_radius: opt_pos("star_radius", 40.0)?,
            coefficient_threshold: get("coefficient_threshold").map(|v| self.finite(v, "run.coefficient_threshold")).transpose()?.unwrap_or(0.0),
            intensity_threshold: opt_pos("intensity_threshold", 0.01)?,
            autocorr_radius: opt_pos("autocorr_radius", 5.0)?,
            k_box,
            meyer_radius: get("meyer_radius").map(|v| self.positive(v, "run.meyer_radius")).transpose()?,
            meyer_tol: opt_pos("meyer_tol", crate::classify::DEFAULT_MEYER_TOL)?,
            structure_tol: opt_pos("structure_tol", crate::classify::DEFAULT_STRUCTURE_TOL)?,
            translate_cap: get("translate_cap").map(|v| self.uint(v, "run.translate_cap")).transpose()?.unwrap_or(crate::classify::DEFAULT_TRANSLATE_CAP as u64) as usize,
            require_structure: get("require_structure").map(|v| self.bool(v, "run.require_structure")).transpose()?.unwrap_or(false),
            scan: get("scan").map(|v| self.bool(v, "run.scan")).transpose()?.unwrap_or(true),
            region,
        })
    }
}
