use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point behind camera (z = {0})")]
    PointBehindCamera(f64),
    #[error("point outside the viewing volume")]
    OutsideVolume,
    #[error("invalid frustum bounds")]
    InvalidFrustum,
    #[error("viewport has a zero extent")]
    DegenerateViewport,

    #[error("normals are parallel or antiparallel")]
    ParallelNormals,

    #[error("three quad corners are collinear")]
    DegenerateQuad,
    #[error("projective denominator <= 0 at ({x}, {y})")]
    BehindProjection { x: f64, y: f64 },
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("anchor x_int = {0} outside (0, 1)")]
    AnchorOutOfRange(f64),
    #[error("interpolation nodes coincide")]
    CoincidentNodes,
    #[error("row is affine, tangents do not intersect")]
    AffineRow,
    #[error("singular linear system")]
    SingularSystem,
    #[error("map does not belong to the requested class")]
    ClassMismatch,

    #[error("zero-area triangle")]
    DegenerateTriangle,
    #[error("plane has B = 0, constant-depth lines are vertical")]
    HorizontalDegeneracy,
    #[error("h = 0, row family undefined")]
    HDegenerate,
    #[error("g = h = 0, map is affine")]
    AffineMap,
    #[error("line slope does not keep the denominator constant")]
    NotConstantDepth,
    #[error("zero base vector")]
    ZeroVector,

    #[error("not a binary P6 PPM")]
    BadMagic,
    #[error("PPM data truncated")]
    TruncatedData,
    #[error("{0}")]
    Io(String),
    #[error("{}:{line}: {msg}", file.display())]
    ConfigParse {
        file: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{}:{line}: texture not found: {}", file.display(), path.display())]
    MissingTexture {
        file: PathBuf,
        line: usize,
        path: PathBuf,
    },
    #[error("polygon {index}: {source}")]
    Polygon { index: usize, source: Box<Error> },
    #[error("{0}")]
    Usage(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
