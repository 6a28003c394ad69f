//! Scene files: `key = value` globals followed by `[quad]` and
//! `[triangle]` blocks. The grammar is documented in docs/config.md.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analysis::compare::{Method, MethodParams};
use crate::error::{Error, Result};
use crate::geometry::Frustum;
use crate::texmap::bezier::IterParams;
use crate::texmap::quadratic::AnchorRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Shading {
    #[default]
    None,
    /// texel times the interpolated vertex colour
    Modulate,
    /// interpolated normal as RGB, texture ignored
    Normals,
}

impl Shading {
    fn name(self) -> &'static str {
        match self {
            Shading::None => "none",
            Shading::Modulate => "modulate",
            Shading::Normals => "normals",
        }
    }
}

impl FromStr for Shading {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(Shading::None),
            "modulate" => Ok(Shading::Modulate),
            "normals" => Ok(Shading::Normals),
            _ => Err(format!("unknown shading '{s}' (valid: none, modulate, normals)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyKind {
    Quad,
    Triangle,
}

impl PolyKind {
    pub fn corners(self) -> usize {
        match self {
            PolyKind::Quad => 4,
            PolyKind::Triangle => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            PolyKind::Quad => "quad",
            PolyKind::Triangle => "triangle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexSpec {
    /// world position, z > 0 in front of the observer
    pub pos: [f64; 3],
    pub uv: [f64; 2],
    /// linear RGB in [0, 1]
    pub color: [f64; 3],
    pub normal: [f64; 3],
}

impl Default for VertexSpec {
    fn default() -> Self {
        VertexSpec {
            pos: [0.0; 3],
            uv: [0.0; 2],
            color: [1.0; 3],
            normal: [0.0, 0.0, -1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolySpec {
    pub kind: PolyKind,
    pub verts: Vec<VertexSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub width: usize,
    pub height: usize,
    pub frustum: Frustum,
    /// None: built-in 64 x 64 checker
    pub texture: Option<PathBuf>,
    pub method: Method,
    pub du: f64,
    pub x_int: f64,
    pub anchor_near: f64,
    pub eps: f64,
    pub dt0: Option<f64>,
    /// samples per footprint side, 0 for nearest texel
    pub aniso: usize,
    pub shading: Shading,
    pub background: [u8; 3],
    pub polys: Vec<PolySpec>,
}

impl Default for SceneConfig {
    fn default() -> Self {
        let p = MethodParams::default();
        SceneConfig {
            width: 256,
            height: 256,
            frustum: Frustum::symmetric(1.0, 1.0, 1.0, 100.0).expect("valid frustum"),
            texture: None,
            method: Method::Exact,
            du: p.du,
            x_int: p.x_int,
            anchor_near: p.anchor_rule.near,
            eps: p.iter.eps,
            dt0: p.iter.dt0,
            aniso: 0,
            shading: Shading::None,
            background: [0; 3],
            polys: Vec::new(),
        }
    }
}

impl SceneConfig {
    pub fn method_params(&self) -> MethodParams {
        MethodParams {
            du: self.du,
            x_int: self.x_int,
            anchor_rule: AnchorRule { near: self.anchor_near },
            iter: IterParams {
                eps: self.eps,
                dt0: self.dt0,
                ..IterParams::default()
            },
        }
    }

    /// Parses without touching the filesystem. `file` only labels errors.
    pub fn parse(text: &str, file: &Path) -> Result<SceneConfig> {
        Ok(parse_lines(text, file)?.0)
    }

    /// Reads and parses `path`; a relative texture path is resolved against
    /// the file's directory and must exist.
    pub fn load(path: &Path) -> Result<SceneConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let (mut cfg, tex_line) = parse_lines(&text, path)?;
        if let Some(t) = &cfg.texture {
            let full = match path.parent() {
                Some(dir) if t.is_relative() => dir.join(t),
                _ => t.clone(),
            };
            if !full.is_file() {
                return Err(Error::MissingTexture {
                    file: path.to_path_buf(),
                    line: tex_line,
                    path: t.clone(),
                });
            }
            cfg.texture = Some(full);
        }
        Ok(cfg)
    }
}

fn parse_lines(text: &str, file: &Path) -> Result<(SceneConfig, usize)> {
    let mut cfg = SceneConfig::default();
    let mut tex_line = 0;
    // open block and the line it started on
    let mut block: Option<(PolySpec, usize, Vec<bool>)> = None;
    let err = |line: usize, msg: String| Error::ConfigParse {
        file: file.to_path_buf(),
        line,
        msg,
    };
    let close = |cfg: &mut SceneConfig, b: Option<(PolySpec, usize, Vec<bool>)>| -> Result<()> {
        if let Some((p, line, seen)) = b {
            if let Some(k) = seen.iter().position(|s| !s) {
                return Err(err(line, format!("{} block has no v{k}", p.kind.name())));
            }
            cfg.polys.push(p);
        }
        Ok(())
    };
    for (idx, raw) in text.lines().enumerate() {
        let n = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let kind = match name.trim() {
                "quad" => PolyKind::Quad,
                "triangle" => PolyKind::Triangle,
                other => return Err(err(n, format!("unknown section [{other}]"))),
            };
            close(&mut cfg, block.take())?;
            let poly = PolySpec {
                kind,
                verts: vec![VertexSpec::default(); kind.corners()],
            };
            block = Some((poly, n, vec![false; kind.corners()]));
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(n, format!("expected key = value, got '{line}'")));
        };
        let (key, value) = (key.trim(), value.trim());
        let bad = |msg: String| err(n, format!("{key}: {msg}"));
        if let Some((poly, _, seen)) = block.as_mut() {
            let split = key.find(|c: char| c.is_ascii_digit()).ok_or_else(|| bad("missing corner index".into()))?;
            let (field, idx) = key.split_at(split);
            let k: usize = idx.parse().map_err(|_| bad("bad corner index".into()))?;
            let corners = poly.kind.corners();
            if k >= corners {
                return Err(bad(format!("corner index must be below {corners}")));
            }
            let v = &mut poly.verts[k];
            match field {
                "v" => {
                    v.pos = floats(value).map_err(bad)?;
                    seen[k] = true;
                }
                "uv" => v.uv = floats(value).map_err(bad)?,
                "c" => v.color = floats(value).map_err(bad)?,
                "n" => v.normal = floats(value).map_err(bad)?,
                _ => return Err(bad("unknown vertex field (v, uv, c, n)".into())),
            }
            continue;
        }
        match key {
            "width" => cfg.width = positive(value).map_err(bad)?,
            "height" => cfg.height = positive(value).map_err(bad)?,
            "frustum" => {
                let [a, b, c, d, e, f] = floats(value).map_err(bad)?;
                cfg.frustum = Frustum::new(a, b, c, d, e, f).map_err(|e| bad(e.to_string()))?;
            }
            "texture" => {
                if value.is_empty() {
                    return Err(bad("empty path".into()));
                }
                cfg.texture = Some(PathBuf::from(value));
                tex_line = n;
            }
            "method" => cfg.method = value.parse().map_err(|e: Error| bad(e.to_string()))?,
            "du" => cfg.du = positive_f(value).map_err(bad)?,
            "x_int" => {
                let [x] = floats(value).map_err(bad)?;
                if !(x > 0.0 && x < 1.0) {
                    return Err(bad("must lie in (0, 1)".into()));
                }
                cfg.x_int = x;
            }
            "anchor_near" => cfg.anchor_near = positive_f(value).map_err(bad)?,
            "eps" => cfg.eps = positive_f(value).map_err(bad)?,
            "dt0" => cfg.dt0 = if value == "auto" { None } else { Some(positive_f(value).map_err(bad)?) },
            "aniso" => cfg.aniso = value.parse().map_err(|_| bad("expected a sample count".into()))?,
            "shading" => cfg.shading = value.parse().map_err(bad)?,
            "background" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                let rgb: Vec<u8> = parts.iter().filter_map(|p| p.parse().ok()).collect();
                cfg.background = rgb.try_into().map_err(|_| bad("expected three integers in 0..=255".into()))?;
                if parts.len() != 3 {
                    return Err(bad("expected three integers in 0..=255".into()));
                }
            }
            _ => return Err(bad("unknown key".into())),
        }
    }
    close(&mut cfg, block)?;
    Ok((cfg, tex_line))
}

fn floats<const N: usize>(s: &str) -> std::result::Result<[f64; N], String> {
    let vals: Vec<f64> = s
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| format!("'{t}' is not a number")))
        .collect::<std::result::Result<_, _>>()?;
    if vals.iter().any(|v| !v.is_finite()) {
        return Err("values must be finite".into());
    }
    vals.try_into().map_err(|v: Vec<f64>| format!("expected {N} numbers, got {}", v.len()))
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("'{s}' is not a positive integer")),
    }
}

fn positive_f(s: &str) -> std::result::Result<f64, String> {
    let [v] = floats(s)?;
    if v > 0.0 { Ok(v) } else { Err(format!("'{s}' must be positive")) }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for SceneConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fr = &self.frustum;
        writeln!(f, "width = {}", self.width)?;
        writeln!(f, "height = {}", self.height)?;
        writeln!(f, "frustum = {}", join(&[fr.x_n, fr.x_m, fr.y_n, fr.y_m, fr.z_n, fr.z_m]))?;
        if let Some(t) = &self.texture {
            writeln!(f, "texture = {}", t.display())?;
        }
        writeln!(f, "method = {}", self.method)?;
        writeln!(f, "du = {}", self.du)?;
        writeln!(f, "x_int = {}", self.x_int)?;
        writeln!(f, "anchor_near = {}", self.anchor_near)?;
        writeln!(f, "eps = {}", self.eps)?;
        match self.dt0 {
            Some(d) => writeln!(f, "dt0 = {d}")?,
            None => writeln!(f, "dt0 = auto")?,
        }
        writeln!(f, "aniso = {}", self.aniso)?;
        writeln!(f, "shading = {}", self.shading.name())?;
        let [r, g, b] = self.background;
        writeln!(f, "background = {r} {g} {b}")?;
        for p in &self.polys {
            writeln!(f, "\n[{}]", p.kind.name())?;
            for (k, v) in p.verts.iter().enumerate() {
                writeln!(f, "v{k} = {}", join(&v.pos))?;
                writeln!(f, "uv{k} = {}", join(&v.uv))?;
                writeln!(f, "c{k} = {}", join(&v.color))?;
                writeln!(f, "n{k} = {}", join(&v.normal))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SAMPLE: &str = "\
width = 64
height = 48   # small
method = quad
[quad]
v0 = -1 -1 2
v1 = 1 -1 2
v2 = 1 1 4
v3 = -1 1 4
uv2 = 1 1
[triangle]
v0 = 0 0 3
v1 = 1 0 3
v2 = 0 1 3
c1 = 1 0 0
";

    fn parse(s: &str) -> Result<SceneConfig> {
        SceneConfig::parse(s, Path::new("scene.cfg"))
    }

    #[test]
    fn sample_parses() {
        let c = parse(SAMPLE).unwrap();
        assert_eq!((c.width, c.height, c.method), (64, 48, Method::Quad));
        assert_eq!(c.polys.len(), 2);
        assert_eq!(c.polys[0].verts[2].uv, [1.0, 1.0]);
        assert_eq!(c.polys[1].verts[1].color, [1.0, 0.0, 0.0]);
        assert_eq!(c.polys[1].verts[0].normal, [0.0, 0.0, -1.0]);
    }

    #[test]
    fn errors_carry_line() {
        let cases = [
            ("width = 0\n", 1),
            ("\n\nmethod = fast\n", 3),
            ("[quad]\nv0 = 1 2\n", 2),
            ("[quad]\nv0 = 1 2 3\nv1 = 1 2 3\nv2 = 1 2 3\n[triangle]\n", 1),
            ("[hexagon]\n", 1),
            ("colour = red\n", 1),
            ("[triangle]\nv3 = 0 0 1\n", 2),
            ("x_int = 1\n", 1),
            ("background = 1 2 300\n", 1),
        ];
        for (text, want) in cases {
            match parse(text) {
                Err(Error::ConfigParse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn missing_texture_names_line() {
        let dir = std::env::temp_dir().join(format!("percor-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("s.cfg");
        std::fs::write(&path, "width = 8\n\ntexture = nowhere.ppm\n").unwrap();
        match SceneConfig::load(&path) {
            Err(Error::MissingTexture { line, path: p, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(p, PathBuf::from("nowhere.ppm"));
            }
            other => panic!("{other:?}"),
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e6..1e6f64, any::<f64>().prop_filter("finite", |v| v.is_finite())]
    }

    fn vertex() -> impl Strategy<Value = VertexSpec> {
        (
            proptest::array::uniform3(finite()),
            proptest::array::uniform2(finite()),
            proptest::array::uniform3(finite()),
            proptest::array::uniform3(finite()),
        )
            .prop_map(|(pos, uv, color, normal)| VertexSpec { pos, uv, color, normal })
    }

    fn poly() -> impl Strategy<Value = PolySpec> {
        prop_oneof![
            proptest::collection::vec(vertex(), 4).prop_map(|verts| PolySpec { kind: PolyKind::Quad, verts }),
            proptest::collection::vec(vertex(), 3).prop_map(|verts| PolySpec { kind: PolyKind::Triangle, verts }),
        ]
    }

    proptest! {
        #[test]
        fn round_trip(
            w in 1usize..4096, h in 1usize..4096,
            du in 1e-9..1.0f64, x_int in 0.001..0.999f64, eps in 1e-9..1.0f64,
            dt0 in proptest::option::of(1e-9..1.0f64),
            aniso in 0usize..32, m in 0usize..Method::ALL.len(), s in 0usize..3,
            bg in proptest::array::uniform3(any::<u8>()),
            polys in proptest::collection::vec(poly(), 0..4),
        ) {
            let c = SceneConfig {
                width: w, height: h, du, x_int, eps, dt0, aniso,
                method: Method::ALL[m],
                shading: [Shading::None, Shading::Modulate, Shading::Normals][s],
                texture: Some(PathBuf::from("tex/checker.ppm")),
                background: bg,
                polys,
                ..SceneConfig::default()
            };
            let back = parse(&c.to_string()).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
