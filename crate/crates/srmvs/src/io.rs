//! File formats and dataset layout.
//!
//! - Images: binary PGM (P5) and PPM (P6), 8-bit.
//! - Point clouds: PLY, written as binary little-endian float32 positions
//!   with optional uchar colors; the reader also accepts ascii PLY and
//!   skips unknown scalar properties.
//! - Depth maps: a small fixed binary format (magic `SRMVSDM1`).
//! - Datasets: a directory with `cameras.txt`, `images/`, and optional
//!   `gt/cloud.ply` plus `gt/depth/`.

use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::fusion::PointCloud;
use crate::geometry::{PinholeCamera, Pose, View};
use crate::image::Image;
use crate::patchmatch::DepthMap;

const DEPTH_MAGIC: &[u8; 8] = b"SRMVSDM1";

fn fmt_err(path: &Path, detail: impl Into<String>) -> Error {
    Error::format(path.display().to_string(), detail)
}

// ---------------------------------------------------------------------------
// PGM / PPM
// ---------------------------------------------------------------------------

/// Reads the next ASCII token from a PNM header, skipping whitespace and
/// `#` comments. Returns the token and the offset one past it.
fn pnm_token(bytes: &[u8], mut pos: usize) -> Option<(String, usize)> {
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        break;
    }
    let start = pos;
    while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
        pos += 1;
    }
    if pos == start {
        return None;
    }
    Some((String::from_utf8_lossy(&bytes[start..pos]).into_owned(), pos))
}

/// Reads a binary PGM (P5, one channel) or PPM (P6, three channels) file
/// into an image with values in [0, 1].
pub fn read_image(path: &Path) -> Result<Image> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (magic, pos) = pnm_token(&bytes, 0).ok_or_else(|| fmt_err(path, "empty file"))?;
    let channels = match magic.as_str() {
        "P5" => 1,
        "P6" => 3,
        other => return Err(fmt_err(path, format!("unsupported magic {other:?} (want P5 or P6)"))),
    };
    let mut pos = pos;
    let mut dims = [0usize; 3];
    for d in &mut dims {
        let (tok, p) = pnm_token(&bytes, pos).ok_or_else(|| fmt_err(path, "truncated header"))?;
        *d = tok
            .parse()
            .map_err(|_| fmt_err(path, format!("bad header token {tok:?}")))?;
        pos = p;
    }
    let [width, height, maxval] = dims;
    if maxval != 255 {
        return Err(fmt_err(path, format!("unsupported maxval {maxval} (want 255)")));
    }
    if width == 0 || height == 0 {
        return Err(fmt_err(path, "zero image dimension"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(fmt_err(path, "missing raster separator"));
    }
    pos += 1;
    let need = width * height * channels;
    if bytes.len() - pos < need {
        return Err(fmt_err(
            path,
            format!("raster truncated: need {need} bytes, have {}", bytes.len() - pos),
        ));
    }
    let data: Vec<f64> = bytes[pos..pos + need].iter().map(|&b| b as f64 / 255.0).collect();
    Image::from_data(width, height, channels, data)
}

/// Writes an image as binary PGM (1 channel) or PPM (3 channels),
/// quantizing each sample to `round(v * 255)`.
pub fn write_image(path: &Path, image: &Image) -> Result<()> {
    let magic = if image.channels() == 1 { "P5" } else { "P6" };
    let mut out = Vec::with_capacity(32 + image.data().len());
    out.extend_from_slice(format!("{magic}\n{} {}\n255\n", image.width(), image.height()).as_bytes());
    out.extend(image.data().iter().map(|&v| (v * 255.0).round() as u8));
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// PLY
// ---------------------------------------------------------------------------

/// Writes a point cloud as binary little-endian PLY: float32 x/y/z,
/// plus uchar red/green/blue when colors are present.
pub fn write_ply(path: &Path, cloud: &PointCloud) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let has_color = cloud.colors.is_some();
    let has_normal = cloud.normals.is_some();
    let mut header = String::new();
    header.push_str("ply\nformat binary_little_endian 1.0\n");
    header.push_str(&format!("element vertex {}\n", cloud.points.len()));
    header.push_str("property float x\nproperty float y\nproperty float z\n");
    if has_normal {
        header.push_str("property float nx\nproperty float ny\nproperty float nz\n");
    }
    if has_color {
        header.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    }
    header.push_str("end_header\n");
    w.write_all(header.as_bytes()).map_err(|e| Error::io(path, e))?;
    for (i, p) in cloud.points.iter().enumerate() {
        let mut rec: Vec<u8> = Vec::with_capacity(27);
        for v in [p.x, p.y, p.z] {
            rec.extend_from_slice(&(v as f32).to_le_bytes());
        }
        if let Some(ns) = &cloud.normals {
            for v in [ns[i].x, ns[i].y, ns[i].z] {
                rec.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
        if let Some(cs) = &cloud.colors {
            for v in cs[i] {
                rec.push((v * 255.0).round().clamp(0.0, 255.0) as u8);
            }
        }
        w.write_all(&rec).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PlyScalar {
    F32,
    F64,
    U8,
    I8,
    U16,
    I16,
    U32,
    I32,
}

impl PlyScalar {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "float" | "float32" => Self::F32,
            "double" | "float64" => Self::F64,
            "uchar" | "uint8" => Self::U8,
            "char" | "int8" => Self::I8,
            "ushort" | "uint16" => Self::U16,
            "short" | "int16" => Self::I16,
            "uint" | "uint32" => Self::U32,
            "int" | "int32" => Self::I32,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Self::U8 | Self::I8 => 1,
            Self::U16 | Self::I16 => 2,
            Self::F32 | Self::U32 | Self::I32 => 4,
            Self::F64 => 8,
        }
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Self::F32 => f32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Self::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
            Self::U8 => b[0] as f64,
            Self::I8 => b[0] as i8 as f64,
            Self::U16 => u16::from_le_bytes(b[..2].try_into().unwrap()) as f64,
            Self::I16 => i16::from_le_bytes(b[..2].try_into().unwrap()) as f64,
            Self::U32 => u32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Self::I32 => i32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
        }
    }
}

struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<(String, PlyScalar)>,
}

/// Reads a PLY point cloud (ascii or binary little-endian). Unknown scalar
/// properties are skipped; list properties are rejected. Malformed headers
/// report the byte offset of the offending line.
pub fn read_ply(path: &Path) -> Result<PointCloud> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut pos = 0usize;
    let next_line = |pos: &mut usize| -> Option<(String, usize)> {
        if *pos >= bytes.len() {
            return None;
        }
        let start = *pos;
        let end = bytes[start..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|i| start + i)
            .unwrap_or(bytes.len());
        *pos = end + 1;
        Some((
            String::from_utf8_lossy(&bytes[start..end]).trim_end_matches('\r').to_string(),
            start,
        ))
    };

    let (first, off) = next_line(&mut pos).ok_or_else(|| fmt_err(path, "empty file"))?;
    if first.trim() != "ply" {
        return Err(fmt_err(path, format!("byte {off}: not a PLY file")));
    }
    let mut ascii = None;
    let mut elements: Vec<PlyElement> = Vec::new();
    let data_start;
    loop {
        let Some((line, off)) = next_line(&mut pos) else {
            return Err(fmt_err(path, "header ended without end_header"));
        };
        let line = line.trim();
        if line.is_empty() || line.starts_with("comment") || line.starts_with("obj_info") {
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("format") => {
                ascii = match tok.next() {
                    Some("ascii") => Some(true),
                    Some("binary_little_endian") => Some(false),
                    other => {
                        return Err(fmt_err(
                            path,
                            format!("byte {off}: unsupported format {other:?}"),
                        ))
                    }
                };
            }
            Some("element") => {
                let name = tok
                    .next()
                    .ok_or_else(|| fmt_err(path, format!("byte {off}: element without name")))?;
                let count: usize = tok
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| fmt_err(path, format!("byte {off}: bad element count")))?;
                elements.push(PlyElement {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| fmt_err(path, format!("byte {off}: property before element")))?;
                let ty = tok
                    .next()
                    .ok_or_else(|| fmt_err(path, format!("byte {off}: property without type")))?;
                if ty == "list" {
                    return Err(fmt_err(
                        path,
                        format!("byte {off}: list properties are not supported"),
                    ));
                }
                let scalar = PlyScalar::parse(ty)
                    .ok_or_else(|| fmt_err(path, format!("byte {off}: unknown type {ty:?}")))?;
                let name = tok
                    .next()
                    .ok_or_else(|| fmt_err(path, format!("byte {off}: property without name")))?;
                el.properties.push((name.to_string(), scalar));
            }
            Some("end_header") => {
                data_start = pos;
                break;
            }
            other => {
                return Err(fmt_err(
                    path,
                    format!("byte {off}: unexpected header keyword {other:?}"),
                ))
            }
        }
    }
    let ascii = ascii.ok_or_else(|| fmt_err(path, "header missing format line"))?;

    let mut cloud = PointCloud::default();
    let mut colors: Vec<[f64; 3]> = Vec::new();
    let mut normals: Vec<Vector3<f64>> = Vec::new();
    let mut has_color = false;
    let mut has_normal = false;

    let mut cursor = data_start;
    let mut ascii_tokens: Vec<f64> = Vec::new();
    if ascii {
        for (ln, raw) in String::from_utf8_lossy(&bytes[data_start..]).lines().enumerate() {
            for t in raw.split_whitespace() {
                let v: f64 = t.parse().map_err(|_| {
                    fmt_err(path, format!("data line {}: bad number {t:?}", ln + 1))
                })?;
                ascii_tokens.push(v);
            }
        }
    }
    let mut ascii_pos = 0usize;

    for el in &elements {
        let rec_size: usize = el.properties.iter().map(|(_, s)| s.size()).sum();
        let is_vertex = el.name == "vertex";
        if is_vertex {
            cloud.points.reserve(el.count);
            has_color = ["red", "green", "blue"]
                .iter()
                .all(|n| el.properties.iter().any(|(p, _)| p == n));
            has_normal = ["nx", "ny", "nz"]
                .iter()
                .all(|n| el.properties.iter().any(|(p, _)| p == n));
        }
        for _ in 0..el.count {
            let mut fields: Vec<(String, f64)> = Vec::with_capacity(el.properties.len());
            if ascii {
                for (name, _) in &el.properties {
                    let v = *ascii_tokens.get(ascii_pos).ok_or_else(|| {
                        fmt_err(path, "ascii data truncated")
                    })?;
                    ascii_pos += 1;
                    fields.push((name.clone(), v));
                }
            } else {
                if bytes.len() - cursor < rec_size {
                    return Err(fmt_err(
                        path,
                        format!("byte {cursor}: binary data truncated"),
                    ));
                }
                let mut o = cursor;
                for (name, scalar) in &el.properties {
                    fields.push((name.clone(), scalar.read_le(&bytes[o..])));
                    o += scalar.size();
                }
                cursor += rec_size;
            }
            if !is_vertex {
                continue;
            }
            let get = |n: &str| fields.iter().find(|(f, _)| f == n).map(|(_, v)| *v);
            let (Some(x), Some(y), Some(z)) = (get("x"), get("y"), get("z")) else {
                return Err(fmt_err(path, "vertex element lacks x/y/z"));
            };
            cloud.points.push(Vector3::new(x, y, z));
            if has_color {
                colors.push([
                    get("red").unwrap() / 255.0,
                    get("green").unwrap() / 255.0,
                    get("blue").unwrap() / 255.0,
                ]);
            }
            if has_normal {
                normals.push(Vector3::new(
                    get("nx").unwrap(),
                    get("ny").unwrap(),
                    get("nz").unwrap(),
                ));
            }
        }
    }
    if has_color {
        cloud.colors = Some(colors);
    }
    if has_normal {
        cloud.normals = Some(normals);
    }
    Ok(cloud)
}

// ---------------------------------------------------------------------------
// Depth maps
// ---------------------------------------------------------------------------

/// Writes a depth map: magic, u32 LE width/height/flags (bit 0 = normals
/// present), f32 depths row-major (NaN = invalid), then f32 normal triples
/// when present. Costs are not persisted.
pub fn write_depth_map(path: &Path, map: &DepthMap) -> Result<()> {
    let mut out = Vec::with_capacity(20 + 4 * map.depth.len());
    out.extend_from_slice(DEPTH_MAGIC);
    out.extend_from_slice(&(map.width as u32).to_le_bytes());
    out.extend_from_slice(&(map.height as u32).to_le_bytes());
    let flags: u32 = if map.normal.is_some() { 1 } else { 0 };
    out.extend_from_slice(&flags.to_le_bytes());
    for &d in &map.depth {
        out.extend_from_slice(&(d as f32).to_le_bytes());
    }
    if let Some(normals) = &map.normal {
        for n in normals {
            for &v in n {
                out.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_depth_map(path: &Path) -> Result<DepthMap> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 20 || &bytes[..8] != DEPTH_MAGIC {
        return Err(fmt_err(path, "missing depth-map magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let width = u32_at(8) as usize;
    let height = u32_at(12) as usize;
    let flags = u32_at(16);
    if flags > 1 {
        return Err(fmt_err(path, format!("unknown flags {flags:#x}")));
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| fmt_err(path, "dimension overflow"))?;
    let has_normals = flags & 1 == 1;
    let need = 20 + 4 * n + if has_normals { 12 * n } else { 0 };
    if bytes.len() != need {
        return Err(fmt_err(
            path,
            format!("size mismatch: {} bytes, expected {need}", bytes.len()),
        ));
    }
    let f32_at = |o: usize| f32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as f64;
    let depth: Vec<f64> = (0..n).map(|i| f32_at(20 + 4 * i)).collect();
    let normal = if has_normals {
        let base = 20 + 4 * n;
        Some(
            (0..n)
                .map(|i| {
                    [
                        f32_at(base + 12 * i),
                        f32_at(base + 12 * i + 4),
                        f32_at(base + 12 * i + 8),
                    ]
                })
                .collect(),
        )
    } else {
        None
    };
    Ok(DepthMap {
        width,
        height,
        depth,
        normal,
        cost: vec![0.0; n],
    })
}

// ---------------------------------------------------------------------------
// Dataset directories
// ---------------------------------------------------------------------------

/// A loaded dataset: posed views plus optional ground truth.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub views: Vec<View>,
    pub gt_cloud: Option<PointCloud>,
    pub gt_depth_maps: Option<Vec<DepthMap>>,
}

/// Non-fatal observations from loading (unexpected files, etc.).
pub type Warnings = Vec<String>;

fn parse_camera_line(path: &Path, lineno: usize, line: &str) -> std::result::Result<(String, PinholeCamera, Pose), String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 21 {
        return Err(format!(
            "{}:{}: expected 21 fields (NAME W H fx fy cx cy k1 k2 r11..r33 tx ty tz), got {}",
            path.display(),
            lineno,
            fields.len()
        ));
    }
    let name = fields[0].to_string();
    let mut nums = [0.0f64; 20];
    for (i, f) in fields[1..].iter().enumerate() {
        nums[i] = f
            .parse()
            .map_err(|_| format!("{}:{}: bad number {f:?}", path.display(), lineno))?;
    }
    let (w, h) = (nums[0], nums[1]);
    if w.fract() != 0.0 || h.fract() != 0.0 || w <= 0.0 || h <= 0.0 {
        return Err(format!("{}:{}: bad dimensions {w} x {h}", path.display(), lineno));
    }
    let camera = PinholeCamera::new(
        nums[2], nums[3], nums[4], nums[5], nums[6], nums[7], w as usize, h as usize,
    )
    .map_err(|e| format!("{}:{}: {e}", path.display(), lineno))?;
    let rot = Matrix3::new(
        nums[8], nums[9], nums[10], nums[11], nums[12], nums[13], nums[14], nums[15], nums[16],
    );
    let t = Vector3::new(nums[17], nums[18], nums[19]);
    let pose = Pose::new(rot, t).map_err(|e| format!("{}:{}: {e}", path.display(), lineno))?;
    Ok((name, camera, pose))
}

/// Loads a dataset directory. Per-line camera errors are aggregated into a
/// single validation error; unexpected files become warnings.
pub fn load_dataset(dir: &Path) -> Result<(Dataset, Warnings)> {
    let cam_path = dir.join("cameras.txt");
    let text = fs::read_to_string(&cam_path).map_err(|e| Error::io(&cam_path, e))?;
    let mut problems = Vec::new();
    let mut entries: Vec<(String, PinholeCamera, Pose)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_camera_line(&cam_path, i + 1, line) {
            Ok(e) => {
                if entries.iter().any(|(n, _, _)| *n == e.0) {
                    problems.push(format!("{}:{}: duplicate view name {:?}", cam_path.display(), i + 1, e.0));
                } else {
                    entries.push(e);
                }
            }
            Err(p) => problems.push(p),
        }
    }
    if entries.is_empty() && problems.is_empty() {
        problems.push(format!("{}: no camera entries", cam_path.display()));
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }

    let mut warnings = Vec::new();
    let images_dir = dir.join("images");
    let mut views = Vec::with_capacity(entries.len());
    let mut used: Vec<PathBuf> = Vec::new();
    for (name, camera, pose) in entries {
        let mut found = None;
        for ext in ["pgm", "ppm"] {
            let p = images_dir.join(format!("{name}.{ext}"));
            if p.is_file() {
                found = Some(p);
                break;
            }
        }
        let img_path = found.ok_or_else(|| {
            Error::NotFound(format!(
                "image for view {name:?} (looked for {name}.pgm/.ppm in {})",
                images_dir.display()
            ))
        })?;
        let image = read_image(&img_path)?;
        if image.width() != camera.width || image.height() != camera.height {
            return Err(fmt_err(
                &img_path,
                format!(
                    "image is {}x{} but cameras.txt declares {}x{}",
                    image.width(),
                    image.height(),
                    camera.width,
                    camera.height
                ),
            ));
        }
        used.push(img_path);
        views.push(View::new(image, camera, pose, name)?);
    }
    if let Ok(rd) = fs::read_dir(&images_dir) {
        for entry in rd.flatten() {
            let p = entry.path();
            if p.is_file() && !used.contains(&p) {
                warnings.push(format!("unmatched file in images/: {}", p.display()));
            }
        }
    }

    let gt_cloud_path = dir.join("gt").join("cloud.ply");
    let gt_cloud = if gt_cloud_path.is_file() {
        Some(read_ply(&gt_cloud_path)?)
    } else {
        None
    };
    let gt_depth_dir = dir.join("gt").join("depth");
    let gt_depth_maps = if gt_depth_dir.is_dir() {
        let mut maps = Vec::with_capacity(views.len());
        for v in &views {
            let p = gt_depth_dir.join(format!("{}.dm", v.name));
            if !p.is_file() {
                return Err(Error::NotFound(format!(
                    "ground-truth depth map {}",
                    p.display()
                )));
            }
            maps.push(read_depth_map(&p)?);
        }
        Some(maps)
    } else {
        None
    };

    Ok((
        Dataset {
            views,
            gt_cloud,
            gt_depth_maps,
        },
        warnings,
    ))
}

/// Writes views (and optional ground truth) in the dataset layout that
/// `load_dataset` reads back.
pub fn save_dataset(
    dir: &Path,
    views: &[View],
    gt_cloud: Option<&PointCloud>,
    gt_depth_maps: Option<&[DepthMap]>,
) -> Result<()> {
    let images_dir = dir.join("images");
    fs::create_dir_all(&images_dir).map_err(|e| Error::io(&images_dir, e))?;
    let mut cams = String::from(
        "# NAME WIDTH HEIGHT fx fy cx cy k1 k2 r11 r12 r13 r21 r22 r23 r31 r32 r33 tx ty tz\n",
    );
    for v in views {
        let c = &v.camera;
        let r = v.pose.rotation();
        let t = v.pose.translation();
        cams.push_str(&format!(
            "{} {} {} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e}",
            v.name, c.width, c.height, c.fx, c.fy, c.cx, c.cy, c.k1, c.k2
        ));
        for i in 0..3 {
            for j in 0..3 {
                cams.push_str(&format!(" {:.17e}", r[(i, j)]));
            }
        }
        cams.push_str(&format!(" {:.17e} {:.17e} {:.17e}\n", t.x, t.y, t.z));
        let ext = if v.image.channels() == 1 { "pgm" } else { "ppm" };
        write_image(&images_dir.join(format!("{}.{ext}", v.name)), &v.image)?;
    }
    let cam_path = dir.join("cameras.txt");
    fs::write(&cam_path, cams).map_err(|e| Error::io(&cam_path, e))?;

    if gt_cloud.is_some() || gt_depth_maps.is_some() {
        let gt_dir = dir.join("gt");
        fs::create_dir_all(&gt_dir).map_err(|e| Error::io(&gt_dir, e))?;
        if let Some(cloud) = gt_cloud {
            write_ply(&gt_dir.join("cloud.ply"), cloud)?;
        }
        if let Some(maps) = gt_depth_maps {
            let depth_dir = gt_dir.join("depth");
            fs::create_dir_all(&depth_dir).map_err(|e| Error::io(&depth_dir, e))?;
            for (v, m) in views.iter().zip(maps) {
                write_depth_map(&depth_dir.join(format!("{}.dm", v.name)), m)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;
    use tempfile::tempdir;

    #[test]
    fn pgm_round_trip_is_exact_after_quantization() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("a.pgm");
        let img = Image::from_fn_gray(7, 5, |x, y| (x as f64 * 0.11 + y as f64 * 0.07) % 1.0);
        write_image(&p, &img).unwrap();
        let back = read_image(&p).unwrap();
        assert_eq!((back.width(), back.height(), back.channels()), (7, 5, 1));
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!(((a * 255.0).round() / 255.0 - b).abs() < 1e-12);
        }
        // Second round trip is bit-exact.
        let p2 = dir.path().join("b.pgm");
        write_image(&p2, &back).unwrap();
        assert_eq!(fs::read(&p).unwrap()[3..], fs::read(&p2).unwrap()[3..]);
    }

    #[test]
    fn pgm_header_comments_are_skipped() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("c.pgm");
        let mut bytes = b"P5\n# a comment\n2 2\n# another\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 64, 128, 255]);
        fs::write(&p, bytes).unwrap();
        let img = read_image(&p).unwrap();
        assert_eq!(img.at(1, 1, 0), 1.0);
        assert!((img.at(1, 0, 0) - 64.0 / 255.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_pgm_is_a_format_error() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("t.pgm");
        fs::write(&p, b"P5\n4 4\n255\n\x00\x01").unwrap();
        match read_image(&p) {
            Err(Error::Format { detail, .. }) => assert!(detail.contains("truncated")),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn ply_binary_round_trip() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("c.ply");
        let cloud = PointCloud {
            points: vec![
                Vector3::new(1.0, 2.0, 3.0),
                Vector3::new(-0.5, 0.25, 10.0),
            ],
            colors: Some(vec![[1.0, 0.0, 0.5], [0.0, 1.0, 0.25]]),
            normals: Some(vec![Vector3::new(0.0, 0.0, 1.0), Vector3::new(1.0, 0.0, 0.0)]),
        };
        write_ply(&p, &cloud).unwrap();
        let back = read_ply(&p).unwrap();
        assert_eq!(back.points.len(), 2);
        for (a, b) in cloud.points.iter().zip(&back.points) {
            assert!((a - b).norm() < 1e-6); // f32 storage
        }
        let colors = back.colors.unwrap();
        assert_eq!(colors[0][0], 1.0);
        assert!((colors[0][2] - 128.0 / 255.0).abs() < 1e-12);
        assert_eq!(back.normals.unwrap()[1], Vector3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn ascii_ply_with_unknown_property_is_read() {
        // Fixture in the layout produced by a common external tool:
        // double coordinates plus an extra scalar we ignore.
        let dir = tempdir().unwrap();
        let p = dir.path().join("ext.ply");
        fs::write(
            &p,
            "ply\nformat ascii 1.0\ncomment external writer\n\
             element vertex 3\n\
             property double x\nproperty double y\nproperty double z\n\
             property float confidence\n\
             end_header\n\
             0 0 0 0.9\n1.5 -2 0.125 0.8\n3 4 5 0.7\n",
        )
        .unwrap();
        let cloud = read_ply(&p).unwrap();
        assert_eq!(cloud.points.len(), 3);
        assert_eq!(cloud.points[1], Vector3::new(1.5, -2.0, 0.125));
        assert!(cloud.colors.is_none());
    }

    #[test]
    fn malformed_ply_header_reports_offset() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("bad.ply");
        fs::write(&p, "ply\nformat ascii 1.0\nelement vertex nope\n").unwrap();
        match read_ply(&p) {
            Err(Error::Format { detail, .. }) => {
                assert!(detail.contains("byte 21"), "detail: {detail}")
            }
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn depth_map_round_trip() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("m.dm");
        let map = DepthMap {
            width: 3,
            height: 2,
            depth: vec![1.5, f64::NAN, 2.25, 0.5, 3.0, f64::NAN],
            normal: Some(vec![[0.0, 0.0, -1.0]; 6]),
            cost: vec![0.1; 6],
        };
        write_depth_map(&p, &map).unwrap();
        let back = read_depth_map(&p).unwrap();
        assert_eq!((back.width, back.height), (3, 2));
        for (a, b) in map.depth.iter().zip(&back.depth) {
            assert!(a.is_nan() == b.is_nan());
            if a.is_finite() {
                assert_eq!(*a as f32 as f64, *b); // exact through f32
            }
        }
        assert_eq!(back.normal.unwrap()[0], [0.0, 0.0, -1.0]);
    }

    #[test]
    fn truncated_depth_map_is_a_format_error() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("m.dm");
        let map = DepthMap::new_invalid(4, 4);
        write_depth_map(&p, &map).unwrap();
        let bytes = fs::read(&p).unwrap();
        fs::write(&p, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(read_depth_map(&p), Err(Error::Format { .. })));
    }

    fn sample_views() -> Vec<View> {
        let cam = PinholeCamera::ideal(30.0, 30.0, 7.5, 5.5, 16, 12).unwrap();
        (0..2)
            .map(|i| {
                let pose = Pose::new(Matrix3::identity(), Vector3::new(i as f64 * 0.1, 0.0, 0.0)).unwrap();
                let img = Image::from_fn_gray(16, 12, |x, y| ((x + y + i) % 7) as f64 / 7.0);
                View::new(img, cam.clone(), pose, format!("cam{i}")).unwrap()
            })
            .collect()
    }

    #[test]
    fn dataset_round_trip_with_ground_truth() {
        let dir = tempdir().unwrap();
        let views = sample_views();
        let cloud = PointCloud {
            points: vec![Vector3::new(0.0, 0.0, 2.0)],
            colors: None,
            normals: None,
        };
        let maps = vec![DepthMap::new_invalid(16, 12); 2];
        save_dataset(dir.path(), &views, Some(&cloud), Some(&maps)).unwrap();
        let (ds, warnings) = load_dataset(dir.path()).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(ds.views.len(), 2);
        assert_eq!(ds.views[0].name, "cam0");
        assert_eq!(ds.views[1].pose.translation().x, 0.1);
        assert!((ds.views[0].camera.cx - 7.5).abs() < 1e-15);
        assert_eq!(ds.gt_cloud.unwrap().points.len(), 1);
        assert_eq!(ds.gt_depth_maps.unwrap().len(), 2);
    }

    #[test]
    fn dataset_errors_are_aggregated_with_line_numbers() {
        let dir = tempdir().unwrap();
        fs::create_dir_all(dir.path().join("images")).unwrap();
        fs::write(
            dir.path().join("cameras.txt"),
            "# comment\nshort line\nv0 16 12 30 30 7.5 5.5 0 0 1 0 0 0 1 0 0 0 1 0 0 nope\n",
        )
        .unwrap();
        match load_dataset(dir.path()) {
            Err(Error::Validation(problems)) => {
                assert_eq!(problems.len(), 2);
                assert!(problems[0].contains(":2:"));
                assert!(problems[1].contains(":3:"));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn missing_image_is_not_found() {
        let dir = tempdir().unwrap();
        let views = sample_views();
        save_dataset(dir.path(), &views, None, None).unwrap();
        fs::remove_file(dir.path().join("images").join("cam1.pgm")).unwrap();
        assert!(matches!(load_dataset(dir.path()), Err(Error::NotFound(_))));
    }

    #[test]
    fn stray_image_files_warn() {
        let dir = tempdir().unwrap();
        let views = sample_views();
        save_dataset(dir.path(), &views, None, None).unwrap();
        fs::write(dir.path().join("images").join("extra.pgm"), b"junk").unwrap();
        let (_ds, warnings) = load_dataset(dir.path()).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("extra.pgm"));
    }
}
