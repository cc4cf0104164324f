use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use super::DataError;

pub const EMB_MAGIC: &[u8; 4] = b"EMB1";

/// Row-major `N × D` matrix of `f32` features with one id per row.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    ids: Vec<String>,
    dim: usize,
    data: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(ids: Vec<String>, dim: usize, data: Vec<f32>) -> Result<Self, DataError> {
        if dim == 0 {
            return Err(DataError::DimMismatch("dimension must be positive".into()));
        }
        if data.len() != ids.len() * dim {
            return Err(DataError::DimMismatch(format!(
                "{} ids × {dim} columns needs {} values, got {}",
                ids.len(),
                ids.len() * dim,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(DataError::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for id in &ids {
            if id.len() > u16::MAX as usize {
                return Err(DataError::InvalidId(format!("id longer than {} bytes", u16::MAX)));
            }
            if !seen.insert(id.as_str()) {
                return Err(DataError::DuplicateId(id.clone()));
            }
        }
        Ok(EmbeddingMatrix { ids, dim, data })
    }

    /// Builds a matrix from row vectors, which must share one length.
    pub fn from_rows(ids: Vec<String>, rows: &[Vec<f32>]) -> Result<Self, DataError> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(DataError::DimMismatch("rows have differing lengths".into()));
        }
        Self::new(ids, dim, rows.concat())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f32]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// Keeps the rows whose index satisfies `keep`, preserving order.
    pub fn select(&self, mut keep: impl FnMut(usize) -> bool) -> EmbeddingMatrix {
        let mut ids = Vec::new();
        let mut data = Vec::new();
        for i in 0..self.len() {
            if keep(i) {
                ids.push(self.ids[i].clone());
                data.extend_from_slice(self.row(i));
            }
        }
        EmbeddingMatrix {
            ids,
            dim: self.dim,
            data,
        }
    }
}

fn read_exact_or_truncated<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<(), DataError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        ErrorKind::UnexpectedEof => DataError::TruncatedFile,
        _ => DataError::io("<stream>", e),
    })
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, DataError> {
    let mut b = [0u8; 4];
    read_exact_or_truncated(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

/// Decodes an `EMB1` stream.
pub fn decode_embeddings<R: Read>(mut r: R) -> Result<EmbeddingMatrix, DataError> {
    let mut magic = [0u8; 4];
    read_exact_or_truncated(&mut r, &mut magic)?;
    if &magic != EMB_MAGIC {
        return Err(DataError::BadMagic(magic));
    }
    let n = read_u32(&mut r)? as usize;
    let dim = read_u32(&mut r)? as usize;
    if dim == 0 {
        return Err(DataError::DimMismatch("header dimension is zero".into()));
    }

    let mut ids = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let mut len = [0u8; 2];
        read_exact_or_truncated(&mut r, &mut len)?;
        let mut buf = vec![0u8; u16::from_le_bytes(len) as usize];
        read_exact_or_truncated(&mut r, &mut buf)?;
        let id = String::from_utf8(buf).map_err(|_| DataError::InvalidId("id is not valid UTF-8".into()))?;
        ids.push(id);
    }

    let total = n
        .checked_mul(dim)
        .ok_or_else(|| DataError::DimMismatch("header N·D overflows".into()))?;
    let mut data = Vec::with_capacity(total.min(1 << 28));
    let mut chunk = vec![0u8; 4 * dim.min(1 << 16) * 64];
    let mut remaining = total * 4;
    while remaining > 0 {
        let take = remaining.min(chunk.len());
        read_exact_or_truncated(&mut r, &mut chunk[..take])?;
        data.extend(
            chunk[..take]
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])),
        );
        remaining -= take;
    }

    let mut extra = [0u8; 1];
    match r.read(&mut extra) {
        Ok(0) => {}
        Ok(_) => {
            return Err(DataError::DimMismatch(
                "payload longer than header N·D".into(),
            ))
        }
        Err(e) => return Err(DataError::io("<stream>", e)),
    }

    EmbeddingMatrix::new(ids, dim, data)
}

/// Encodes a matrix as `EMB1`.
pub fn encode_embeddings<W: Write>(m: &EmbeddingMatrix, mut w: W) -> std::io::Result<()> {
    w.write_all(EMB_MAGIC)?;
    w.write_all(&(m.len() as u32).to_le_bytes())?;
    w.write_all(&(m.dim() as u32).to_le_bytes())?;
    for id in m.ids() {
        w.write_all(&(id.len() as u16).to_le_bytes())?;
        w.write_all(id.as_bytes())?;
    }
    for v in m.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

pub fn read_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingMatrix, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| DataError::io(path, e))?;
    decode_embeddings(BufReader::new(file)).map_err(|e| match e {
        DataError::Io { source, .. } => DataError::io(path, source),
        other => other,
    })
}

pub fn write_embeddings(m: &EmbeddingMatrix, path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| DataError::io(path, e))?;
    encode_embeddings(m, BufWriter::new(file)).map_err(|e| DataError::io(path, e))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn encode(m: &EmbeddingMatrix) -> Vec<u8> {
        let mut buf = Vec::new();
        encode_embeddings(m, &mut buf).unwrap();
        buf
    }

    #[test]
    fn two_by_three_round_trip() {
        let m = EmbeddingMatrix::new(
            vec!["a".into(), "β".into()],
            3,
            vec![1.0, -0.0, 3.5e-40, f32::MAX, f32::MIN_POSITIVE, -7.25],
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.emb");
        write_embeddings(&m, &path).unwrap();
        let back = read_embeddings(&path).unwrap();
        assert_eq!(back.ids(), m.ids());
        assert_eq!(back.dim(), 3);
        let bits = |x: &EmbeddingMatrix| x.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&m));
    }

    #[test]
    fn header_layout_is_little_endian() {
        let m = EmbeddingMatrix::new(vec!["ab".into()], 1, vec![1.0]).unwrap();
        let bytes = encode(&m);
        assert_eq!(
            bytes,
            [b'E', b'M', b'B', b'1', 1, 0, 0, 0, 1, 0, 0, 0, 2, 0, b'a', b'b', 0, 0, 0x80, 0x3f]
        );
    }

    #[test]
    fn bad_magic() {
        let mut bytes = encode(&EmbeddingMatrix::new(vec!["a".into()], 1, vec![1.0]).unwrap());
        bytes[3] = b'9';
        assert!(matches!(
            decode_embeddings(&bytes[..]),
            Err(DataError::BadMagic(m)) if &m == b"EMB9"
        ));
    }

    #[test]
    fn short_payload_is_truncated() {
        let ids: Vec<String> = (0..5).map(|i| format!("r{i}")).collect();
        let m = EmbeddingMatrix::new(ids, 2, vec![0.5; 10]).unwrap();
        let bytes = encode(&m);
        let cut = &bytes[..bytes.len() - 2 * 4];
        assert!(matches!(decode_embeddings(cut), Err(DataError::TruncatedFile)));
    }

    #[test]
    fn long_payload_is_dim_mismatch() {
        let mut bytes = encode(&EmbeddingMatrix::new(vec!["a".into()], 1, vec![1.0]).unwrap());
        bytes.extend_from_slice(&2.0f32.to_le_bytes());
        assert!(matches!(decode_embeddings(&bytes[..]), Err(DataError::DimMismatch(_))));
    }

    #[test]
    fn rejects_non_finite_and_duplicates() {
        assert!(matches!(
            EmbeddingMatrix::new(vec!["a".into()], 2, vec![1.0, f32::NAN]),
            Err(DataError::NonFinite { row: 0, col: 1 })
        ));
        assert!(matches!(
            EmbeddingMatrix::new(vec!["a".into(), "a".into()], 1, vec![1.0, 2.0]),
            Err(DataError::DuplicateId(_))
        ));
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            rows in 0usize..6,
            dim in 1usize..9,
            bits in proptest::collection::vec(any::<u32>(), 0..64),
        ) {
            let data: Vec<f32> = (0..rows * dim)
                .map(|i| {
                    let v = f32::from_bits(bits.get(i).copied().unwrap_or(i as u32));
                    if v.is_finite() { v } else { i as f32 }
                })
                .collect();
            let ids: Vec<String> = (0..rows).map(|i| format!("id-{i}")).collect();
            let m = EmbeddingMatrix::new(ids, dim, data).unwrap();
            let back = decode_embeddings(&encode(&m)[..]).unwrap();
            prop_assert_eq!(back.ids(), m.ids());
            let a: Vec<u32> = back.data().iter().map(|v| v.to_bits()).collect();
            let b: Vec<u32> = m.data().iter().map(|v| v.to_bits()).collect();
            prop_assert_eq!(a, b);
        }
    }
}
