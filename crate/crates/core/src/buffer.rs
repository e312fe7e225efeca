//! Interleaved image storage plus PNG/JPEG decode and PNG encode.

use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use crate::color::quantize_u8;
use crate::error::{Error, Result};

/// Channel layout of an [`ImageBuffer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelOrder {
    Gray,
    Rgb,
}

impl ChannelOrder {
    pub fn channels(self) -> usize {
        match self {
            ChannelOrder::Gray => 1,
            ChannelOrder::Rgb => 3,
        }
    }

    pub fn from_channels(channels: usize) -> Result<Self> {
        match channels {
            1 => Ok(ChannelOrder::Gray),
            3 => Ok(ChannelOrder::Rgb),
            n => Err(Error::Channels(n)),
        }
    }
}

/// Row-major, channel-interleaved image with every sample in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    order: ChannelOrder,
    data: Vec<f64>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, order: ChannelOrder, data: Vec<f64>) -> Result<Self> {
        let channels = order.channels();
        if data.len() != width * height * channels {
            return Err(Error::BufferShape {
                len: data.len(),
                width,
                height,
                channels,
            });
        }
        for &v in &data {
            if !v.is_finite() {
                return Err(Error::NonFinite(v));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    value: v,
                    min: 0.0,
                    max: 1.0,
                });
            }
        }
        Ok(ImageBuffer {
            width,
            height,
            order,
            data,
        })
    }

    /// Widens 32-bit samples; range is checked as in [`ImageBuffer::new`].
    pub fn from_f32(width: usize, height: usize, order: ChannelOrder, data: &[f32]) -> Result<Self> {
        Self::new(width, height, order, data.iter().map(|&v| f64::from(v)).collect())
    }

    /// 8-bit samples, normalized by exact division by 255.
    pub fn from_u8(width: usize, height: usize, order: ChannelOrder, data: &[u8]) -> Result<Self> {
        let data: Vec<f64> = data.iter().map(|&v| f64::from(v) / 255.0).collect();
        Self::new(width, height, order, data)
    }

    pub fn filled(width: usize, height: usize, order: ChannelOrder, value: f64) -> Result<Self> {
        Self::new(width, height, order, vec![value; width * height * order.channels()])
    }

    /// Builds from a per-pixel closure returning the channel values.
    pub fn from_fn<F>(width: usize, height: usize, order: ChannelOrder, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> [f64; 3],
    {
        let channels = order.channels();
        let mut data = Vec::with_capacity(width * height * channels);
        for y in 0..height {
            for x in 0..width {
                let px = f(x, y);
                data.extend_from_slice(&px[..channels]);
            }
        }
        Self::new(width, height, order, data)
    }

    /// Internal constructor for buffers whose contents are already known to
    /// be in range.
    pub(crate) fn from_parts(width: usize, height: usize, order: ChannelOrder, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height * order.channels());
        ImageBuffer {
            width,
            height,
            order,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.order.channels()
    }

    pub fn order(&self) -> ChannelOrder {
        self.order
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels())
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> &[f64] {
        let c = self.channels();
        let i = (y * self.width + x) * c;
        &self.data[i..i + c]
    }

    /// Applies `f` to every sample, clamping the result into `[0, 1]`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let data = self.data.iter().map(|&v| f(v).clamp(0.0, 1.0)).collect();
        Self::from_parts(self.width, self.height, self.order, data)
    }

    /// The V (max channel) plane; the buffer itself for grayscale.
    pub fn value_plane(&self) -> Vec<f64> {
        match self.order {
            ChannelOrder::Gray => self.data.clone(),
            ChannelOrder::Rgb => self
                .data
                .chunks_exact(3)
                .map(|p| p[0].max(p[1]).max(p[2]))
                .collect(),
        }
    }

    /// Rec. 601 luma plane; the buffer itself for grayscale.
    pub fn luma_plane(&self) -> Vec<f64> {
        match self.order {
            ChannelOrder::Gray => self.data.clone(),
            ChannelOrder::Rgb => self
                .data
                .chunks_exact(3)
                .map(|p| crate::color::luma_raw(p[0], p[1], p[2]))
                .collect(),
        }
    }

    pub fn to_u8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize_u8(v)).collect()
    }

    pub fn to_dynamic(&self) -> DynamicImage {
        let (w, h) = (self.width as u32, self.height as u32);
        let bytes = self.to_u8();
        match self.order {
            ChannelOrder::Gray => DynamicImage::ImageLuma8(
                image::GrayImage::from_raw(w, h, bytes).expect("length checked at construction"),
            ),
            ChannelOrder::Rgb => DynamicImage::ImageRgb8(
                image::RgbImage::from_raw(w, h, bytes).expect("length checked at construction"),
            ),
        }
    }

    /// Converts a decoded image. Grayscale sources stay single-channel, alpha
    /// is dropped, 16-bit sources are normalized by 65535.
    pub fn from_dynamic(img: &DynamicImage) -> Result<Self> {
        let (w, h) = (img.width() as usize, img.height() as usize);
        if w == 0 || h == 0 {
            return Err(Error::EmptyImage);
        }
        match img {
            DynamicImage::ImageLuma8(_) | DynamicImage::ImageLumaA8(_) => {
                Self::from_u8(w, h, ChannelOrder::Gray, img.to_luma8().as_raw())
            }
            DynamicImage::ImageLuma16(_) | DynamicImage::ImageLumaA16(_) => {
                let data = img.to_luma16().as_raw().iter().map(|&v| f64::from(v) / 65535.0).collect();
                Self::new(w, h, ChannelOrder::Gray, data)
            }
            DynamicImage::ImageRgb16(_) | DynamicImage::ImageRgba16(_) => {
                let data = img.to_rgb16().as_raw().iter().map(|&v| f64::from(v) / 65535.0).collect();
                Self::new(w, h, ChannelOrder::Rgb, data)
            }
            DynamicImage::ImageRgb32F(_) | DynamicImage::ImageRgba32F(_) => {
                Self::from_f32(w, h, ChannelOrder::Rgb, img.to_rgb32f().as_raw())
            }
            _ => Self::from_u8(w, h, ChannelOrder::Rgb, img.to_rgb8().as_raw()),
        }
    }
}

/// Decodes PNG or JPEG bytes.
pub fn decode_image(bytes: &[u8]) -> Result<ImageBuffer> {
    let format = image::guess_format(bytes).map_err(|e| Error::Decode(e.to_string()))?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Jpeg) {
        return Err(Error::Decode(format!("unsupported format {format:?}")));
    }
    let img = image::load_from_memory_with_format(bytes, format).map_err(|e| Error::Decode(e.to_string()))?;
    ImageBuffer::from_dynamic(&img)
}

pub fn encode_png(img: &ImageBuffer) -> Result<Vec<u8>> {
    let mut out = Cursor::new(Vec::new());
    img.to_dynamic()
        .write_to(&mut out, ImageFormat::Png)
        .map_err(|e| Error::Encode(e.to_string()))?;
    Ok(out.into_inner())
}

pub fn read_image(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes).map_err(|e| match e {
        Error::Decode(msg) => Error::Decode(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_png(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_png(img)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_is_checked() {
        let err = ImageBuffer::new(2, 2, ChannelOrder::Rgb, vec![0.0; 11]).unwrap_err();
        assert!(matches!(err, Error::BufferShape { len: 11, .. }));
        assert!(ImageBuffer::new(2, 2, ChannelOrder::Gray, vec![0.0; 4]).is_ok());
        assert!(ChannelOrder::from_channels(4).is_err());
    }

    #[test]
    fn range_is_checked() {
        assert!(ImageBuffer::new(1, 1, ChannelOrder::Gray, vec![1.5]).is_err());
        assert!(ImageBuffer::new(1, 1, ChannelOrder::Gray, vec![f64::NAN]).is_err());
        assert!(ImageBuffer::from_f32(1, 1, ChannelOrder::Gray, &[-0.5]).is_err());
    }

    #[test]
    fn png_round_trip_is_exact_for_8bit() {
        let bytes: Vec<u8> = (0..4 * 3 * 3).map(|i| (i * 7 % 256) as u8).collect();
        let img = ImageBuffer::from_u8(4, 3, ChannelOrder::Rgb, &bytes).unwrap();
        let png = encode_png(&img).unwrap();
        let back = decode_image(&png).unwrap();
        assert_eq!(back, img);
        assert_eq!(back.to_u8(), bytes);
    }

    #[test]
    fn grayscale_stays_single_channel() {
        let img = ImageBuffer::from_u8(3, 2, ChannelOrder::Gray, &[0, 50, 100, 150, 200, 255]).unwrap();
        let back = decode_image(&encode_png(&img).unwrap()).unwrap();
        assert_eq!(back.order(), ChannelOrder::Gray);
        assert_eq!(back, img);
    }

    #[test]
    fn garbage_is_a_decode_error() {
        assert!(matches!(decode_image(b"not an image"), Err(Error::Decode(_))));
        assert!(matches!(decode_image(&[0x89, b'P', b'N', b'G']), Err(Error::Decode(_))));
    }

    #[test]
    fn planes() {
        let img = ImageBuffer::new(2, 1, ChannelOrder::Rgb, vec![0.1, 0.5, 0.2, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(img.value_plane(), vec![0.5, 1.0]);
        let y = img.luma_plane();
        assert!((y[1] - 0.299).abs() < 1e-15);
        assert_eq!(img.pixel(1, 0), &[1.0, 0.0, 0.0]);
    }
}
