//! Body description files, the `NHGF` binary grid layout with its JSON
//! metadata twin, and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nehari_core::bump::{GridDomain, GridFunction};
use nehari_core::classify::HullRaysRep;
use nehari_core::domain::{ConvexBody, Hyperplane};
use nehari_core::hankel::ComplexMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NehariError, Result};

pub const GRID_MAGIC: &[u8; 4] = b"NHGF";
pub const GRID_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceDesc {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayDesc {
    pub origin: usize,
    pub dir: Vec<f64>,
}

/// JSON body description; `type` selects the constructor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodyDesc {
    Ball { center: Vec<f64>, radius: f64 },
    Hpoly { halfspaces: Vec<HalfspaceDesc> },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Vpoly { vertices: Vec<Vec<f64>> },
    Hullrays { points: Vec<Vec<f64>>, rays: Vec<RayDesc> },
    Paraboloid { dim: usize, coefficient: f64 },
    Cone { dim: usize },
    Sum { left: Box<BodyDesc>, right: Box<BodyDesc> },
    Negate { body: Box<BodyDesc> },
    Scale { body: Box<BodyDesc>, factor: f64 },
    Linear { body: Box<BodyDesc>, matrix: Vec<f64> },
    Hull { members: Vec<BodyDesc> },
    /// Same set, strict-interior membership.
    Open { body: Box<BodyDesc> },
}

impl BodyDesc {
    pub fn to_body(&self) -> Result<ConvexBody> {
        Ok(match self {
            BodyDesc::Ball { center, radius } => ConvexBody::ball(center.clone(), *radius)?,
            BodyDesc::Hpoly { halfspaces } => ConvexBody::hpolyhedron(
                halfspaces
                    .iter()
                    .map(|h| Hyperplane::new(h.normal.clone(), h.offset))
                    .collect::<nehari_core::Result<Vec<_>>>()?,
            )?,
            BodyDesc::Box { lo, hi } => ConvexBody::axis_box(lo, hi)?,
            BodyDesc::Vpoly { vertices } => ConvexBody::vpolytope(vertices.clone())?,
            BodyDesc::Hullrays { points, rays } => {
                for r in rays {
                    if r.origin >= points.len() {
                        return Err(NehariError::schema("rays.origin", format!("index {} out of range", r.origin)));
                    }
                }
                ConvexBody::hull_rays(points.clone(), rays.iter().map(|r| r.dir.clone()).collect())?
            }
            BodyDesc::Paraboloid { dim, coefficient } => ConvexBody::paraboloid(*dim, *coefficient)?,
            BodyDesc::Cone { dim } => ConvexBody::lorentz_cone(*dim)?,
            BodyDesc::Sum { left, right } => ConvexBody::sum(left.to_body()?, right.to_body()?)?,
            BodyDesc::Negate { body } => ConvexBody::negate(body.to_body()?),
            BodyDesc::Scale { body, factor } => ConvexBody::scale(body.to_body()?, *factor)?,
            BodyDesc::Linear { body, matrix } => ConvexBody::linear(body.to_body()?, matrix.clone())?,
            BodyDesc::Hull { members } => {
                ConvexBody::hull(members.iter().map(BodyDesc::to_body).collect::<Result<Vec<_>>>()?)?
            }
            BodyDesc::Open { body } => body.to_body()?.with_open(true),
        })
    }

    /// Planar hull-plus-rays descriptions keep their ray origins.
    pub fn to_rep(&self) -> Option<Result<HullRaysRep>> {
        match self {
            BodyDesc::Hullrays { points, rays } => Some(
                HullRaysRep::new(points.clone(), rays.iter().map(|r| (r.origin, r.dir.clone())).collect())
                    .map_err(NehariError::from),
            ),
            BodyDesc::Open { body } => body.to_rep(),
            _ => None,
        }
    }
}

fn schema_error(e: serde_json::Error) -> NehariError {
    let line = e.line();
    let msg = e.to_string();
    let field = msg
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| format!("line {line}"));
    NehariError::schema(field, msg)
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(schema_error)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| NehariError::io(path, e))
}

pub fn read_body(path: &Path) -> Result<BodyDesc> {
    parse_json(&read_text(path)?)
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| NehariError::Format(format!("{} is not a file path", path.display())))?;
    let tmp: PathBuf = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(NehariError::io(path, e));
    }
    Ok(())
}

/// JSON twin of a binary grid file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridMeta {
    pub format: String,
    pub version: u32,
    pub domain: String,
    pub shape: Vec<usize>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub sample_type: String,
    pub payload_bytes: usize,
}

fn domain_name(d: GridDomain) -> &'static str {
    match d {
        GridDomain::Fourier => "fourier",
        GridDomain::Time => "time",
        GridDomain::Matrix => "matrix",
    }
}

pub fn grid_meta(g: &GridFunction) -> GridMeta {
    GridMeta {
        format: String::from_utf8_lossy(GRID_MAGIC).into_owned(),
        version: GRID_VERSION,
        domain: domain_name(g.domain()).to_string(),
        shape: g.shape().to_vec(),
        lo: g.lo().to_vec(),
        hi: g.hi().to_vec(),
        sample_type: "f64-pair-le".to_string(),
        payload_bytes: 16 * g.samples().len(),
    }
}

/// Header: magic, version, ndim, domain tag (u32 each), then per axis
/// `n: u64, lo: f64, hi: f64`; payload: `(re, im)` pairs, all little-endian.
pub fn encode_grid(g: &GridFunction) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 24 * g.ndim() + 16 * g.samples().len());
    out.extend_from_slice(GRID_MAGIC);
    out.extend_from_slice(&GRID_VERSION.to_le_bytes());
    out.extend_from_slice(&(g.ndim() as u32).to_le_bytes());
    out.extend_from_slice(&g.domain().tag().to_le_bytes());
    for a in 0..g.ndim() {
        out.extend_from_slice(&(g.shape()[a] as u64).to_le_bytes());
        out.extend_from_slice(&g.lo()[a].to_le_bytes());
        out.extend_from_slice(&g.hi()[a].to_le_bytes());
    }
    for z in g.samples() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.at + N;
        let s = self.bytes.get(self.at..end).ok_or_else(|| NehariError::Format("truncated grid file".into()))?;
        self.at = end;
        Ok(s.try_into().expect("slice length"))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn decode_grid(bytes: &[u8]) -> Result<GridFunction> {
    let mut r = Reader { bytes, at: 0 };
    if &r.take::<4>()? != GRID_MAGIC {
        return Err(NehariError::Format("bad magic".into()));
    }
    let version = r.u32()?;
    if version != GRID_VERSION {
        return Err(NehariError::Format(format!("unsupported version {version}")));
    }
    let ndim = r.u32()? as usize;
    let domain = GridDomain::from_tag(r.u32()?).ok_or_else(|| NehariError::Format("unknown domain tag".into()))?;
    let (mut shape, mut lo, mut hi) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..ndim {
        shape.push(r.u64()? as usize);
        lo.push(r.f64()?);
        hi.push(r.f64()?);
    }
    let count: usize = shape.iter().product();
    if bytes.len() != r.at + 16 * count {
        return Err(NehariError::Format(format!("payload holds {} bytes, header implies {}", bytes.len() - r.at, 16 * count)));
    }
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let re = r.f64()?;
        samples.push(Complex64::new(re, r.f64()?));
    }
    Ok(GridFunction::new(lo, hi, shape, samples, domain)?)
}

/// Writes `path` (binary) and `path.json` (metadata twin).
pub fn write_grid(path: &Path, g: &GridFunction) -> Result<()> {
    write_atomic(path, &encode_grid(g))?;
    let meta = serde_json::to_vec_pretty(&grid_meta(g)).map_err(|e| NehariError::Format(e.to_string()))?;
    write_atomic(&twin_path(path), &meta)
}

pub fn read_grid(path: &Path) -> Result<GridFunction> {
    decode_grid(&fs::read(path).map_err(|e| NehariError::io(path, e))?)
}

pub fn twin_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Matrix dump in the grid layout: two axes indexed by row and column.
pub fn matrix_grid(m: &ComplexMatrix) -> Result<GridFunction> {
    Ok(GridFunction::new(
        vec![0.0, 0.0],
        vec![m.rows() as f64, m.cols() as f64],
        vec![m.rows(), m.cols()],
        m.data().to_vec(),
        GridDomain::Matrix,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_round_trip() {
        let text = r#"{"type":"sum","left":{"type":"ball","center":[2,0],"radius":0.5},
                       "right":{"type":"negate","body":{"type":"ball","center":[0,0],"radius":1}}}"#;
        let d: BodyDesc = parse_json(text).unwrap();
        let b = d.to_body().unwrap();
        assert_eq!(b.support(&[1.0, 0.0]).unwrap(), 3.5);
        let again: BodyDesc = parse_json(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn unknown_field_is_named() {
        let err = parse_json::<BodyDesc>(r#"{"type":"ball","center":[0,0],"radius":1,"colour":3}"#).unwrap_err();
        match err {
            NehariError::Schema { field, .. } => assert_eq!(field, "colour"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn grid_round_trip() {
        let g = GridFunction::from_fn(vec![-1.0, 0.0], vec![1.0, 2.0], vec![3, 4], GridDomain::Time, |x| Complex64::new(x[0], x[1])).unwrap();
        let back = decode_grid(&encode_grid(&g)).unwrap();
        assert_eq!(back, g);
        let mut bytes = encode_grid(&g);
        bytes.pop();
        assert!(decode_grid(&bytes).is_err());
    }
}
