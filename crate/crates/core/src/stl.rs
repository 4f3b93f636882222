//! Binary and ASCII STL.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::mesh::TriMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StlFormat {
    Binary,
    Ascii,
}

const HEADER: &[u8] = b"triplegear binary STL";

fn f32s(v: Vec3) -> [f32; 3] {
    [v.x as f32, v.y as f32, v.z as f32]
}

pub fn write_stl(mesh: &TriMesh, format: StlFormat) -> Result<Vec<u8>> {
    let n = mesh.triangles.len();
    match format {
        StlFormat::Binary => {
            let count = u32::try_from(n).map_err(|_| Error::TooLarge(n))?;
            let mut out = Vec::with_capacity(84 + 50 * n);
            let mut header = [0u8; 80];
            header[..HEADER.len()].copy_from_slice(HEADER);
            out.extend_from_slice(&header);
            out.extend_from_slice(&count.to_le_bytes());
            for t in 0..n {
                let [a, b, c] = mesh.corners(t);
                for v in [mesh.normal(t), a, b, c] {
                    for x in f32s(v) {
                        out.extend_from_slice(&x.to_le_bytes());
                    }
                }
                out.extend_from_slice(&0u16.to_le_bytes());
            }
            Ok(out)
        }
        StlFormat::Ascii => {
            let mut s = String::from("solid triplegear\n");
            for t in 0..n {
                let [nx, ny, nz] = f32s(mesh.normal(t));
                let _ = writeln!(s, "  facet normal {nx:e} {ny:e} {nz:e}\n    outer loop");
                for v in mesh.corners(t) {
                    let [x, y, z] = f32s(v);
                    let _ = writeln!(s, "      vertex {x:e} {y:e} {z:e}");
                }
                s.push_str("    endloop\n  endfacet\n");
            }
            s.push_str("endsolid triplegear\n");
            Ok(s.into_bytes())
        }
    }
}

fn parse_err(offset: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        msg: msg.into(),
    }
}

struct Welder {
    map: HashMap<[u32; 3], u32>,
    mesh: TriMesh,
}

impl Welder {
    fn new() -> Self {
        Welder {
            map: HashMap::new(),
            mesh: TriMesh::default(),
        }
    }

    fn vertex(&mut self, p: [f32; 3]) -> u32 {
        let key = [p[0].to_bits(), p[1].to_bits(), p[2].to_bits()];
        let mesh = &mut self.mesh;
        *self.map.entry(key).or_insert_with(|| {
            mesh.vertices
                .push(Vec3::new(p[0] as f64, p[1] as f64, p[2] as f64));
            mesh.vertices.len() as u32 - 1
        })
    }

    fn triangle(&mut self, t: [[f32; 3]; 3]) {
        let idx = [self.vertex(t[0]), self.vertex(t[1]), self.vertex(t[2])];
        self.mesh.triangles.push(idx);
    }
}

fn read_binary(bytes: &[u8]) -> Result<TriMesh> {
    if bytes.len() < 84 {
        return Err(parse_err(
            bytes.len(),
            "file shorter than the 84-byte header",
        ));
    }
    let n = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    let want = 84 + 50 * n;
    if bytes.len() != want {
        return Err(parse_err(
            bytes.len().min(want),
            format!("size {} but {n} triangles need {want}", bytes.len()),
        ));
    }
    let mut w = Welder::new();
    for t in 0..n {
        let base = 84 + 50 * t + 12;
        let mut tri = [[0f32; 3]; 3];
        for (k, v) in tri.iter_mut().enumerate() {
            for (j, x) in v.iter_mut().enumerate() {
                let o = base + 12 * k + 4 * j;
                *x = f32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
                if !x.is_finite() {
                    return Err(parse_err(o, "non-finite coordinate"));
                }
            }
        }
        w.triangle(tri);
    }
    Ok(w.mesh)
}

fn read_ascii(text: &str) -> Result<TriMesh> {
    let mut w = Welder::new();
    let mut pending: Vec<[f32; 3]> = Vec::new();
    let mut offset = 0;
    let mut ended = false;
    for line in text.split_inclusive('\n') {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("vertex") => {
                let mut p = [0f32; 3];
                for x in &mut p {
                    *x = it
                        .next()
                        .and_then(|s| s.parse().ok())
                        .filter(|v: &f32| v.is_finite())
                        .ok_or_else(|| parse_err(offset, "bad vertex coordinate"))?;
                }
                pending.push(p);
            }
            Some("endloop") => {
                if pending.len() != 3 {
                    return Err(parse_err(
                        offset,
                        format!("facet with {} vertices", pending.len()),
                    ));
                }
                w.triangle([pending[0], pending[1], pending[2]]);
                pending.clear();
            }
            Some("endsolid") => ended = true,
            Some("solid" | "facet" | "outer" | "endfacet") | None => {}
            Some(tok) => return Err(parse_err(offset, format!("unexpected token {tok:?}"))),
        }
        offset += line.len();
    }
    if !ended || !pending.is_empty() {
        return Err(parse_err(offset, "truncated ASCII solid"));
    }
    Ok(w.mesh)
}

/// Parse STL (binary or ASCII), welding vertices with bit-identical
/// float32 coordinates.
pub fn read_stl(bytes: &[u8]) -> Result<TriMesh> {
    let binary_size = bytes.len() >= 84
        && 84 + 50 * u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize == bytes.len();
    if !binary_size && bytes.starts_with(b"solid") {
        let text =
            std::str::from_utf8(bytes).map_err(|e| parse_err(e.valid_up_to(), "invalid UTF-8"))?;
        return read_ascii(text);
    }
    read_binary(bytes)
}
