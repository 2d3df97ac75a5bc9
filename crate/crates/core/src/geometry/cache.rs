//! Binary sidecar cache for subspace registries.
//!
//! Files are keyed by descriptor, field modulus and crate version. The
//! format is little-endian: a magic string, the key, then per rank the
//! canonical bases, point sets, perp point sets and child lists.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use fixedbitset::FixedBitSet;

use super::enumerate::{Enumeration, Level, Registry};
use super::subspace::Subspace;
use super::{GeometryError, GeometryInstance};
use crate::field::Elem;

const MAGIC: &[u8; 8] = b"FLAGSPC1";

pub fn cache_key(g: &GeometryInstance) -> String {
    let modulus: Vec<String> = g.field.modulus().iter().map(|c| c.to_string()).collect();
    format!("{}|{}|{}", g.descriptor, modulus.join(","), env!("CARGO_PKG_VERSION"))
}

pub fn cache_path(dir: &Path, g: &GeometryInstance) -> PathBuf {
    let name: String = cache_key(g)
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' })
        .collect();
    dir.join(format!("{name}.bin"))
}

struct Writer<W: Write>(W);

impl<W: Write> Writer<W> {
    fn u32(&mut self, v: u32) -> io::Result<()> {
        self.0.write_all(&v.to_le_bytes())
    }
    fn u64(&mut self, v: u64) -> io::Result<()> {
        self.0.write_all(&v.to_le_bytes())
    }
    fn bits(&mut self, b: &FixedBitSet) -> io::Result<()> {
        let blocks = b.as_slice();
        self.u32(blocks.len() as u32)?;
        for &x in blocks {
            self.u64(x as u64)?;
        }
        Ok(())
    }
}

struct Reader<R: Read>(R);

impl<R: Read> Reader<R> {
    fn u32(&mut self) -> io::Result<u32> {
        let mut b = [0u8; 4];
        self.0.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }
    fn u64(&mut self) -> io::Result<u64> {
        let mut b = [0u8; 8];
        self.0.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }
    fn bits(&mut self, len: usize) -> io::Result<FixedBitSet> {
        let count = self.u32()? as usize;
        let mut blocks = Vec::with_capacity(count);
        for _ in 0..count {
            blocks.push(self.u64()? as usize);
        }
        Ok(FixedBitSet::with_capacity_and_blocks(len, blocks))
    }
}

pub fn save(path: &Path, g: &GeometryInstance, reg: &Registry) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut w = Writer(io::BufWriter::new(fs::File::create(&tmp)?));
        w.0.write_all(MAGIC)?;
        let key = cache_key(g);
        w.u32(key.len() as u32)?;
        w.0.write_all(key.as_bytes())?;
        w.u32(reg.dim as u32)?;
        w.u32(reg.npoints as u32)?;
        w.u32(reg.levels.len() as u32)?;
        for level in &reg.levels {
            w.u32(level.subspaces.len() as u32)?;
            for (i, s) in level.subspaces.iter().enumerate() {
                w.u32(s.rank() as u32)?;
                for e in s.basis() {
                    w.0.write_all(&e.0.to_le_bytes())?;
                }
                w.bits(&level.points[i])?;
                if !level.perp.is_empty() {
                    w.bits(&level.perp[i])?;
                }
                w.u32(level.children[i].len() as u32)?;
                for &c in &level.children[i] {
                    w.u32(c)?;
                }
            }
        }
        match &reg.generator_plus {
            None => w.u32(0)?,
            Some(classes) => {
                w.u32(1)?;
                w.u32(classes.len() as u32)?;
                w.0.write_all(&classes.iter().map(|&b| b as u8).collect::<Vec<_>>())?;
            }
        }
        w.0.flush()?;
    }
    fs::rename(tmp, path)
}

/// Reads a cached registry; `Ok(None)` when the file is absent or was
/// written for a different key.
pub fn load(path: &Path, g: &GeometryInstance) -> io::Result<Option<Registry>> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut r = Reader(io::BufReader::new(file));
    let mut magic = [0u8; 8];
    r.0.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Ok(None);
    }
    let key_len = r.u32()? as usize;
    let mut key = vec![0u8; key_len];
    r.0.read_exact(&mut key)?;
    if key != cache_key(g).as_bytes() {
        return Ok(None);
    }
    let dim = r.u32()? as usize;
    let npoints = r.u32()? as usize;
    let nlevels = r.u32()? as usize;
    let polar = g.is_polar();
    let mut levels = Vec::with_capacity(nlevels);
    for _ in 0..nlevels {
        let count = r.u32()? as usize;
        let mut level = Level::default();
        for i in 0..count {
            let rank = r.u32()? as usize;
            let mut basis = Vec::with_capacity(rank * dim);
            for _ in 0..rank * dim {
                let mut b = [0u8; 2];
                r.0.read_exact(&mut b)?;
                basis.push(Elem(u16::from_le_bytes(b)));
            }
            let s = Subspace::from_rref(dim, basis);
            level.index.insert(s.clone(), i as u32);
            level.subspaces.push(s);
            level.points.push(r.bits(npoints)?);
            if polar {
                level.perp.push(r.bits(npoints)?);
            }
            let nchildren = r.u32()? as usize;
            let mut kids = Vec::with_capacity(nchildren);
            for _ in 0..nchildren {
                kids.push(r.u32()?);
            }
            level.children.push(kids);
        }
        levels.push(level);
    }
    let generator_plus = if r.u32()? == 1 {
        let len = r.u32()? as usize;
        let mut raw = vec![0u8; len];
        r.0.read_exact(&mut raw)?;
        Some(raw.into_iter().map(|b| b == 1).collect())
    } else {
        None
    };
    Ok(Some(Registry { dim, npoints, levels, generator_plus }))
}

/// Builds the enumeration, going through the cache directory when given.
pub fn enumerate_cached(
    g: &GeometryInstance,
    dir: Option<&Path>,
    max_flags: u64,
) -> Result<Enumeration, GeometryError> {
    let Some(dir) = dir else {
        return Enumeration::build_with_limit(g, max_flags);
    };
    let expected = super::counts::Counts::of(g).flag_count_b()?;
    if expected > max_flags {
        return Err(GeometryError::TooManyFlags { count: expected, limit: max_flags });
    }
    let path = cache_path(dir, g);
    let cached = load(&path, g).map_err(|e| GeometryError::Cache(format!("reading {}: {e}", path.display())))?;
    let registry = match cached {
        Some(reg) => reg,
        None => {
            let reg = Registry::build(g)?;
            save(&path, g, &reg).map_err(|e| GeometryError::Cache(format!("writing {}: {e}", path.display())))?;
            reg
        }
    };
    Ok(Enumeration::from_registry(g, registry))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_the_registry() {
        let dir = std::env::temp_dir().join(format!("flagspec-cache-test-{}", std::process::id()));
        for s in ["B:2:2:2:sp", "A:2:3", "B:2:0:2:hyp"] {
            let g = GeometryInstance::parse(s).unwrap();
            let fresh = Enumeration::build(&g).unwrap();
            let first = enumerate_cached(&g, Some(&dir), u64::MAX).unwrap();
            let second = enumerate_cached(&g, Some(&dir), u64::MAX).unwrap();
            assert!(cache_path(&dir, &g).exists());
            for e in [&first, &second] {
                assert_eq!(e.chains, fresh.chains);
                assert_eq!(e.registry.levels.len(), fresh.registry.levels.len());
                for (a, b) in e.registry.levels.iter().zip(&fresh.registry.levels) {
                    assert_eq!(a.subspaces, b.subspaces);
                    assert_eq!(a.points, b.points);
                    assert_eq!(a.perp, b.perp);
                    assert_eq!(a.children, b.children);
                }
                assert_eq!(e.registry.generator_plus, fresh.registry.generator_plus);
            }
        }
        fs::remove_dir_all(dir).ok();
    }
}
