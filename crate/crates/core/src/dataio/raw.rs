use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use super::DataError;

pub const RAW_MAGIC: &[u8; 4] = b"RAW1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RawDtype {
    I16,
    U16,
    F32,
}

impl RawDtype {
    pub fn code(self) -> u8 {
        match self {
            RawDtype::I16 => 0,
            RawDtype::U16 => 1,
            RawDtype::F32 => 2,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, DataError> {
        match code {
            0 => Ok(RawDtype::I16),
            1 => Ok(RawDtype::U16),
            2 => Ok(RawDtype::F32),
            other => Err(DataError::UnknownEnumValue {
                field: "dtype",
                value: other.to_string(),
            }),
        }
    }

    fn size(self) -> usize {
        match self {
            RawDtype::I16 | RawDtype::U16 => 2,
            RawDtype::F32 => 4,
        }
    }
}

/// Typed sample payload of a raw array.
#[derive(Debug, Clone, PartialEq)]
pub enum RawValues {
    I16(Vec<i16>),
    U16(Vec<u16>),
    F32(Vec<f32>),
}

impl RawValues {
    pub fn len(&self) -> usize {
        match self {
            RawValues::I16(v) => v.len(),
            RawValues::U16(v) => v.len(),
            RawValues::F32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dtype(&self) -> RawDtype {
        match self {
            RawValues::I16(_) => RawDtype::I16,
            RawValues::U16(_) => RawDtype::U16,
            RawValues::F32(_) => RawDtype::F32,
        }
    }

    /// Samples widened to `f64`.
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            RawValues::I16(v) => v.iter().map(|&x| x as f64).collect(),
            RawValues::U16(v) => v.iter().map(|&x| x as f64).collect(),
            RawValues::F32(v) => v.iter().map(|&x| x as f64).collect(),
        }
    }
}

/// Unquantized scalar image (e.g. Hounsfield units) awaiting normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawIntensityArray {
    width: u32,
    height: u32,
    channels: u8,
    values: RawValues,
}

impl RawIntensityArray {
    pub fn new(width: u32, height: u32, channels: u8, values: RawValues) -> Result<Self, DataError> {
        if channels != 1 && channels != 3 {
            return Err(DataError::DimMismatch(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        let expected = width as usize * height as usize * channels as usize;
        if values.len() != expected {
            return Err(DataError::DimMismatch(format!(
                "{width}×{height}×{channels} needs {expected} samples, got {}",
                values.len()
            )));
        }
        Ok(RawIntensityArray {
            width,
            height,
            channels,
            values,
        })
    }

    /// Single-channel `float32` array.
    pub fn from_f32(width: u32, height: u32, values: Vec<f32>) -> Result<Self, DataError> {
        Self::new(width, height, 1, RawValues::F32(values))
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn values(&self) -> &RawValues {
        &self.values
    }
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<(), DataError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        ErrorKind::UnexpectedEof => DataError::TruncatedFile,
        _ => DataError::io("<stream>", e),
    })
}

pub fn decode_raw<R: Read>(mut r: R) -> Result<RawIntensityArray, DataError> {
    let mut header = [0u8; 14];
    read_exact(&mut r, &mut header[..4])?;
    let magic = [header[0], header[1], header[2], header[3]];
    if &magic != RAW_MAGIC {
        return Err(DataError::BadMagic(magic));
    }
    read_exact(&mut r, &mut header[4..])?;
    let width = u32::from_le_bytes(header[4..8].try_into().unwrap());
    let height = u32::from_le_bytes(header[8..12].try_into().unwrap());
    let channels = header[12];
    let dtype = RawDtype::from_code(header[13])?;

    let count = width as usize * height as usize * channels as usize;
    let mut payload = vec![0u8; count * dtype.size()];
    read_exact(&mut r, &mut payload)?;
    let mut extra = [0u8; 1];
    if r.read(&mut extra).map_err(|e| DataError::io("<stream>", e))? != 0 {
        return Err(DataError::DimMismatch("payload longer than header".into()));
    }

    let values = match dtype {
        RawDtype::I16 => RawValues::I16(
            payload.chunks_exact(2).map(|b| i16::from_le_bytes([b[0], b[1]])).collect(),
        ),
        RawDtype::U16 => RawValues::U16(
            payload.chunks_exact(2).map(|b| u16::from_le_bytes([b[0], b[1]])).collect(),
        ),
        RawDtype::F32 => RawValues::F32(
            payload
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
                .collect(),
        ),
    };
    RawIntensityArray::new(width, height, channels, values)
}

pub fn encode_raw<W: Write>(a: &RawIntensityArray, mut w: W) -> std::io::Result<()> {
    w.write_all(RAW_MAGIC)?;
    w.write_all(&a.width.to_le_bytes())?;
    w.write_all(&a.height.to_le_bytes())?;
    w.write_all(&[a.channels, a.values.dtype().code()])?;
    match &a.values {
        RawValues::I16(v) => v.iter().try_for_each(|x| w.write_all(&x.to_le_bytes()))?,
        RawValues::U16(v) => v.iter().try_for_each(|x| w.write_all(&x.to_le_bytes()))?,
        RawValues::F32(v) => v.iter().try_for_each(|x| w.write_all(&x.to_le_bytes()))?,
    }
    w.flush()
}

pub fn read_raw(path: impl AsRef<Path>) -> Result<RawIntensityArray, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| DataError::io(path, e))?;
    decode_raw(BufReader::new(file))
}

pub fn write_raw(a: &RawIntensityArray, path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| DataError::io(path, e))?;
    encode_raw(a, BufWriter::new(file)).map_err(|e| DataError::io(path, e))
}
