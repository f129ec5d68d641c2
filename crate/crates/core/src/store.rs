//! On-disk candidate store: a JSON manifest plus one little-endian binary
//! blob per candidate. See `STORE_FORMAT.md` at the repository root.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::forward::{PoseCandidateArtifacts, UncertainPose, VertexEnclosure, POSE_DIM};
use crate::geometry::polytope::HPolytope2;
use crate::geometry::{BinaryImage, CameraParams, Target};
use crate::partition::{partition, PartitionConfig, PoseSpace};
use crate::set::{FactorId, Interval, PolyZonotope};

pub const FORMAT_NAME: &str = "certipose-store";
pub const FORMAT_VERSION: u32 = 1;
const BLOB_MAGIC: &[u8; 4] = b"CPCB";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlobEntry {
    pub file: String,
    pub sha256: String,
    pub depth: usize,
    pub depth_capped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StoreManifest {
    pub format: String,
    pub version: u32,
    pub camera: CameraParams,
    pub target_name: String,
    pub target_fingerprint: String,
    pub pose_space: PoseSpace,
    pub partition: PartitionConfig,
    pub candidate_count: usize,
    pub discarded_invisible: usize,
    pub discarded_depth: usize,
    pub candidates: Vec<BlobEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateStore {
    pub manifest: StoreManifest,
    pub candidates: Vec<PoseCandidateArtifacts>,
}

/// Partitions `space` and keeps the artifacts of every accepted box.
pub fn precompute_store(
    target: &Target,
    cam: &CameraParams,
    space: &PoseSpace,
    cfg: &PartitionConfig,
) -> Result<CandidateStore> {
    let part = partition(target, cam, space, cfg)?;
    let blobs: Vec<BlobEntry> = part
        .leaves
        .par_iter()
        .enumerate()
        .map(|(i, leaf)| BlobEntry {
            file: blob_name(i),
            sha256: hex::encode(Sha256::digest(encode_candidate(&leaf.artifacts))),
            depth: leaf.depth,
            depth_capped: leaf.depth_capped,
        })
        .collect();
    Ok(CandidateStore {
        manifest: StoreManifest {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            camera: *cam,
            target_name: target.name().into(),
            target_fingerprint: target.fingerprint(),
            pose_space: space.clone(),
            partition: *cfg,
            candidate_count: part.leaves.len(),
            discarded_invisible: part.discarded_invisible,
            discarded_depth: part.discarded_depth,
            candidates: blobs,
        },
        candidates: part.leaves.into_iter().map(|l| l.artifacts).collect(),
    })
}

fn blob_name(i: usize) -> String {
    format!("candidates/{i:06}.bin")
}

impl CandidateStore {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn check_matches(&self, cam: &CameraParams, target: &Target) -> Result<()> {
        if self.manifest.camera != *cam {
            return Err(Error::StoreMismatch(format!(
                "store camera {:?}, configured {:?}",
                self.manifest.camera, cam
            )));
        }
        let fp = target.fingerprint();
        if self.manifest.target_fingerprint != fp {
            return Err(Error::StoreMismatch(format!(
                "store target fingerprint {}, configured {fp}",
                self.manifest.target_fingerprint
            )));
        }
        Ok(())
    }

    /// Writes the manifest and blobs; blobs are written in candidate order.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir.join("candidates"))?;
        for (entry, art) in self.manifest.candidates.iter().zip(&self.candidates) {
            fs::write(dir.join(&entry.file), encode_candidate(art))?;
        }
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        fs::write(dir.join(MANIFEST_FILE), text)?;
        Ok(())
    }

    /// Reads a store, checking the format version, blob hashes and the
    /// consistency of every vertex decomposition.
    pub fn load(dir: &Path) -> Result<Self> {
        let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
        let manifest: StoreManifest = serde_json::from_str(&text)
            .map_err(|e| Error::StoreCorrupt(format!("manifest: {e}")))?;
        if manifest.format != FORMAT_NAME || manifest.version != FORMAT_VERSION {
            return Err(Error::StoreCorrupt(format!(
                "unsupported format {} v{}",
                manifest.format, manifest.version
            )));
        }
        if manifest.candidates.len() != manifest.candidate_count {
            return Err(Error::StoreCorrupt(
                "candidate count does not match blob list".into(),
            ));
        }
        manifest.camera.validate()?;
        let cam = manifest.camera;
        let candidates = manifest
            .candidates
            .par_iter()
            .map(|entry| {
                let path: PathBuf = dir.join(&entry.file);
                let bytes = fs::read(&path)?;
                if hex::encode(Sha256::digest(&bytes)) != entry.sha256 {
                    return Err(Error::StoreCorrupt(format!(
                        "hash mismatch in {}",
                        entry.file
                    )));
                }
                decode_candidate(&bytes, &cam)
                    .map_err(|e| Error::StoreCorrupt(format!("{}: {e}", entry.file)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            manifest,
            candidates,
        })
    }
}

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u32).to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn f64s(&mut self, v: &[f64]) {
        v.iter().for_each(|&x| self.f64(x));
    }

    fn image(&mut self, img: &BinaryImage) {
        self.u32(img.width());
        self.u32(img.height());
        img.words().iter().for_each(|&w| self.u64(w));
    }

    fn set(&mut self, s: &PolyZonotope) {
        let dim = s.dim();
        self.u32(dim);
        self.u32(s.ids().len());
        s.ids().iter().for_each(|id| self.u32(id.0 as usize));
        self.u32(s.num_dep());
        self.u32(s.num_indep());
        self.f64s(s.as_matrix().offset());
        (0..s.num_dep()).for_each(|i| self.f64s(s.dep_gen(i)));
        (0..s.num_indep()).for_each(|j| self.f64s(s.indep_gen(j)));
        for i in 0..s.num_dep() {
            s.exponent(i).iter().for_each(|&e| self.u32(e as usize));
        }
    }
}

/// Serializes one candidate's artifacts.
pub fn encode_candidate(art: &PoseCandidateArtifacts) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(BLOB_MAGIC);
    w.u32(FORMAT_VERSION as usize);
    w.f64s(art.pose.bounds().lo());
    w.f64s(art.pose.bounds().hi());
    w.f64(art.error_ratio);
    w.u64(art.pixel_tests as u64);
    w.image(&art.outer_image);
    w.u32(art.vertices.len());
    for i in 0..art.vertices.len() {
        w.image(&art.polygon_images[i]);
        let hull = &art.hulls[i];
        w.u32(hull.len());
        for (a, &b) in hull.a().iter().zip(hull.b()) {
            w.f64s(a);
            w.f64(b);
        }
        w.u32(art.vertices[i].len());
        for (k, v) in art.vertices[i].iter().enumerate() {
            w.f64s(&art.center_projection[i][k]);
            w.set(&v.set);
            w.f64s(&v.lin_offset);
            v.lin_gen.iter().for_each(|g| w.f64s(g));
            w.u32(v.err_gens.len());
            v.err_gens.iter().for_each(|g| w.f64s(g));
            w.f64s(v.hull.lo());
            w.f64s(v.hull.hi());
            w.image(&v.bitmap);
        }
    }
    w.0
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::StoreCorrupt("truncated blob".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")) as usize)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        // Bounded by the remaining bytes so a corrupt count cannot allocate.
        if n > (self.buf.len() - self.pos) / 8 {
            return Err(Error::StoreCorrupt("truncated blob".into()));
        }
        (0..n).map(|_| self.f64()).collect()
    }

    fn pair(&mut self) -> Result<[f64; 2]> {
        Ok([self.f64()?, self.f64()?])
    }

    fn image(&mut self) -> Result<BinaryImage> {
        let (w, h) = (self.u32()?, self.u32()?);
        let n = (w * h).div_ceil(64);
        if n > (self.buf.len() - self.pos) / 8 {
            return Err(Error::StoreCorrupt("truncated blob".into()));
        }
        let words = (0..n).map(|_| self.u64()).collect::<Result<Vec<_>>>()?;
        BinaryImage::from_words(w, h, words)
    }

    fn set(&mut self) -> Result<PolyZonotope> {
        let dim = self.u32()?;
        let nids = self.u32()?;
        let ids = (0..nids)
            .map(|_| self.u32().map(|v| FactorId(v as u32)))
            .collect::<Result<Vec<_>>>()?;
        let ndep = self.u32()?;
        let nindep = self.u32()?;
        let offset = self.f64s(dim)?;
        let dep = self.f64s(ndep * dim)?;
        let indep = self.f64s(nindep * dim)?;
        let exp = (0..ndep * nids)
            .map(|_| self.u32().map(|v| v as u32))
            .collect::<Result<Vec<_>>>()?;
        PolyZonotope::new(offset, dep, indep, exp, ids)
    }
}

/// Inverse of [`encode_candidate`]; vertex decompositions are checked
/// against a fresh decomposition of the stored set.
pub fn decode_candidate(bytes: &[u8], cam: &CameraParams) -> Result<PoseCandidateArtifacts> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4)? != BLOB_MAGIC {
        return Err(Error::StoreCorrupt("bad blob magic".into()));
    }
    if r.u32()? != FORMAT_VERSION as usize {
        return Err(Error::StoreCorrupt("blob version".into()));
    }
    let lo = r.f64s(POSE_DIM)?;
    let hi = r.f64s(POSE_DIM)?;
    let pose = UncertainPose::new(Interval::new(lo, hi)?)?;
    let error_ratio = r.f64()?;
    let pixel_tests = r.u64()? as usize;
    let outer_image = r.image()?;
    let npoly = r.u32()?;
    let mut polygon_images = Vec::new();
    let mut hulls = Vec::new();
    let mut vertices = Vec::new();
    let mut center_projection = Vec::new();
    for _ in 0..npoly {
        polygon_images.push(r.image()?);
        let m = r.u32()?;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for _ in 0..m {
            a.push(r.pair()?);
            b.push(r.f64()?);
        }
        hulls.push(HPolytope2::new(a, b)?);
        let nv = r.u32()?;
        let mut proj = Vec::new();
        let mut encl = Vec::new();
        for _ in 0..nv {
            proj.push(r.pair()?);
            let set = r.set()?;
            let lin_offset = r.pair()?;
            let mut lin_gen = [[0.0; 2]; POSE_DIM];
            for g in &mut lin_gen {
                *g = r.pair()?;
            }
            let nerr = r.u32()?;
            let err_gens = (0..nerr).map(|_| r.pair()).collect::<Result<Vec<_>>>()?;
            let hlo = r.f64s(2)?;
            let hhi = r.f64s(2)?;
            let hull = Interval::new(hlo, hhi)?;
            let bitmap = r.image()?;
            let v = VertexEnclosure {
                set,
                lin_offset,
                lin_gen,
                err_gens,
                hull,
                bitmap,
            };
            if VertexEnclosure::from_set(v.set.clone(), cam)? != v {
                return Err(Error::StoreCorrupt(
                    "vertex decomposition disagrees with its set".into(),
                ));
            }
            encl.push(v);
        }
        center_projection.push(proj);
        vertices.push(encl);
    }
    if r.pos != bytes.len() {
        return Err(Error::StoreCorrupt("trailing bytes".into()));
    }
    Ok(PoseCandidateArtifacts {
        pose,
        outer_image,
        polygon_images,
        hulls,
        vertices,
        center_projection,
        error_ratio,
        pixel_tests,
    })
}
