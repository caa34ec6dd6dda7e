//! Dual-head Q-networks: a shared trunk feeding a 7-wide motor head and a
//! 25-wide sensory head.
//!
//! Parameters live in a flat list of [`Tensor`]s so that checkpointing, SGD
//! and gradient checks treat both variants uniformly. Arithmetic is `f64`.

use rand::Rng;

pub use super::features::SparseFeatures;
use super::features::{feature_len, linear_features};
use crate::env::NUM_MOTOR_ACTIONS;
use crate::error::{Error, Result};
use crate::fovea::{ObservationCanvas, GRID_CELLS};
use crate::frame::{FRAME_PIXELS, FRAME_SIZE};

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        Self {
            shape: shape.to_vec(),
            data: vec![0.0; shape.iter().product()],
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NetworkKind {
    Deep,
    Linear,
}

impl NetworkKind {
    pub fn name(self) -> &'static str {
        match self {
            NetworkKind::Deep => "deep",
            NetworkKind::Linear => "linear",
        }
    }
}

impl std::str::FromStr for NetworkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "deep" => Ok(NetworkKind::Deep),
            "linear" => Ok(NetworkKind::Linear),
            other => Err(Error::Config(format!("unknown network variant {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QNetworkSpec {
    pub kind: NetworkKind,
    /// Number of stacked memory layers the network consumes.
    pub memory_depth: usize,
}

// conv trunk geometry: (out channels, kernel, stride)
const CONV: [(usize, usize, usize); 3] = [(32, 8, 4), (64, 4, 2), (64, 3, 1)];
const HIDDEN: usize = 512;

fn conv_out(size: usize, kernel: usize, stride: usize) -> usize {
    (size - kernel) / stride + 1
}

impl QNetworkSpec {
    pub fn new(kind: NetworkKind, memory_depth: usize) -> Self {
        Self { kind, memory_depth }
    }

    /// Shapes of every parameter tensor, in storage order.
    pub fn param_shapes(&self) -> Vec<Vec<usize>> {
        let n = self.memory_depth;
        match self.kind {
            NetworkKind::Linear => {
                let f = feature_len(n);
                vec![
                    vec![NUM_MOTOR_ACTIONS, f],
                    vec![NUM_MOTOR_ACTIONS],
                    vec![GRID_CELLS, f],
                    vec![GRID_CELLS],
                ]
            }
            NetworkKind::Deep => {
                let mut shapes = Vec::new();
                let mut channels = n;
                let mut size = FRAME_SIZE;
                for (out, k, s) in CONV {
                    shapes.push(vec![out, channels, k, k]);
                    shapes.push(vec![out]);
                    channels = out;
                    size = conv_out(size, k, s);
                }
                let flat = channels * size * size;
                shapes.push(vec![HIDDEN, flat]);
                shapes.push(vec![HIDDEN]);
                shapes.push(vec![NUM_MOTOR_ACTIONS, HIDDEN]);
                shapes.push(vec![NUM_MOTOR_ACTIONS]);
                shapes.push(vec![GRID_CELLS, HIDDEN]);
                shapes.push(vec![GRID_CELLS]);
                shapes
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Input<'a> {
    Dense(&'a [f64]),
    Sparse(&'a [(usize, f64)]),
}

impl Input<'_> {
    fn dot(self, row: &[f64]) -> f64 {
        match self {
            Input::Dense(x) => row.iter().zip(x).map(|(a, b)| a * b).sum(),
            Input::Sparse(x) => x.iter().map(|&(i, v)| row[i] * v).sum(),
        }
    }

    /// `row += g · x`
    fn axpy(self, g: f64, row: &mut [f64]) {
        match self {
            Input::Dense(x) => row.iter_mut().zip(x).for_each(|(r, &xi)| *r += g * xi),
            Input::Sparse(x) => x.iter().for_each(|&(i, v)| row[i] += g * v),
        }
    }
}

/// Network-ready observation.
#[derive(Clone, Debug, PartialEq)]
pub enum EncodedObs {
    Features(SparseFeatures),
    /// `depth × 84 × 84`, row-major.
    Pixels(Vec<f32>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeadValues {
    pub motor: [f64; NUM_MOTOR_ACTIONS],
    pub sensory: [f64; GRID_CELLS],
}

#[derive(Clone, Debug, PartialEq)]
pub struct QNetwork {
    spec: QNetworkSpec,
    params: Vec<Tensor>,
}

/// Activations kept from a forward pass for backpropagation.
struct DeepTrace {
    input: Vec<f64>,
    // post-ReLU outputs of each conv stage and of the dense layer
    conv: [Vec<f64>; 3],
    hidden: Vec<f64>,
}

impl QNetwork {
    pub fn zeros(spec: QNetworkSpec) -> Self {
        let params = spec.param_shapes().iter().map(|s| Tensor::zeros(s)).collect();
        Self { spec, params }
    }

    /// Uniform `±1/√fan_in` initialisation. The linear variant starts at zero.
    pub fn init<R: Rng + ?Sized>(spec: QNetworkSpec, rng: &mut R) -> Self {
        let mut net = Self::zeros(spec);
        if spec.kind == NetworkKind::Deep {
            let mut fan_in = 1;
            for t in &mut net.params {
                if t.shape.len() > 1 {
                    fan_in = t.shape[1..].iter().product::<usize>();
                }
                let bound = 1.0 / (fan_in as f64).sqrt();
                for v in &mut t.data {
                    *v = rng.gen_range(-bound..bound);
                }
            }
        }
        net
    }

    pub fn from_params(spec: QNetworkSpec, params: Vec<Tensor>) -> Result<Self> {
        let shapes = spec.param_shapes();
        if shapes.len() != params.len()
            || shapes.iter().zip(&params).any(|(s, t)| *s != t.shape || t.len() != s.iter().product())
        {
            return Err(Error::Usage(format!(
                "parameter shapes do not match the {} network",
                spec.kind.name()
            )));
        }
        Ok(Self { spec, params })
    }

    pub fn spec(&self) -> QNetworkSpec {
        self.spec
    }

    pub fn params(&self) -> &[Tensor] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [Tensor] {
        &mut self.params
    }

    pub fn zero_grads(&self) -> Vec<Tensor> {
        self.params.iter().map(|t| Tensor::zeros(&t.shape)).collect()
    }

    pub fn num_params(&self) -> usize {
        self.params.iter().map(Tensor::len).sum()
    }

    pub fn encode(&self, canvas: &ObservationCanvas) -> Result<EncodedObs> {
        if canvas.depth() != self.spec.memory_depth {
            return Err(Error::Usage(format!(
                "observation has {} layers, network expects {}",
                canvas.depth(),
                self.spec.memory_depth
            )));
        }
        Ok(match self.spec.kind {
            NetworkKind::Linear => EncodedObs::Features(linear_features(canvas)),
            NetworkKind::Deep => EncodedObs::Pixels(canvas.to_dense()),
        })
    }

    pub fn forward(&self, obs: &EncodedObs) -> Result<HeadValues> {
        match (self.spec.kind, obs) {
            (NetworkKind::Linear, EncodedObs::Features(x)) => {
                self.check_len(x.len, feature_len(self.spec.memory_depth))?;
                Ok(self.linear_heads(Input::Sparse(&x.entries), 0))
            }
            (NetworkKind::Deep, EncodedObs::Pixels(x)) => {
                self.check_len(x.len(), self.spec.memory_depth * FRAME_PIXELS)?;
                let trace = self.deep_forward(x);
                Ok(self.linear_heads(Input::Dense(&trace.hidden), 8))
            }
            _ => Err(Error::Usage("observation encoding does not match network variant".into())),
        }
    }

    /// Accumulates `∂L/∂θ` into `grads` given upstream gradients on both heads.
    pub fn backward(
        &self,
        obs: &EncodedObs,
        d_motor: &[f64; NUM_MOTOR_ACTIONS],
        d_sensory: &[f64; GRID_CELLS],
        grads: &mut [Tensor],
    ) -> Result<()> {
        match (self.spec.kind, obs) {
            (NetworkKind::Linear, EncodedObs::Features(x)) => {
                self.check_len(x.len, feature_len(self.spec.memory_depth))?;
                self.heads_backward(Input::Sparse(&x.entries), 0, d_motor, d_sensory, grads, None);
                Ok(())
            }
            (NetworkKind::Deep, EncodedObs::Pixels(x)) => {
                self.check_len(x.len(), self.spec.memory_depth * FRAME_PIXELS)?;
                let trace = self.deep_forward(x);
                self.deep_backward(&trace, d_motor, d_sensory, grads);
                Ok(())
            }
            _ => Err(Error::Usage("observation encoding does not match network variant".into())),
        }
    }

    fn check_len(&self, got: usize, want: usize) -> Result<()> {
        if got == want {
            Ok(())
        } else {
            Err(Error::Usage(format!("input length {got}, expected {want}")))
        }
    }

    /// Affine motor and sensory heads reading `x`; `first` is the index of the motor weight tensor.
    fn linear_heads(&self, x: Input<'_>, first: usize) -> HeadValues {
        let mut motor = [0.0; NUM_MOTOR_ACTIONS];
        let mut sensory = [0.0; GRID_CELLS];
        affine(&self.params[first], &self.params[first + 1], x, &mut motor);
        affine(&self.params[first + 2], &self.params[first + 3], x, &mut sensory);
        HeadValues { motor, sensory }
    }

    fn heads_backward(
        &self,
        x: Input<'_>,
        first: usize,
        d_motor: &[f64],
        d_sensory: &[f64],
        grads: &mut [Tensor],
        mut d_x: Option<&mut [f64]>,
    ) {
        for (head, d_out) in [(first, d_motor), (first + 2, d_sensory)] {
            let w = &self.params[head];
            let cols = w.shape[1];
            for (o, &g) in d_out.iter().enumerate() {
                if g == 0.0 {
                    continue;
                }
                grads[head + 1].data[o] += g;
                x.axpy(g, &mut grads[head].data[o * cols..(o + 1) * cols]);
                if let Some(dx) = d_x.as_deref_mut() {
                    for (d, &wi) in dx.iter_mut().zip(&w.data[o * cols..(o + 1) * cols]) {
                        *d += g * wi;
                    }
                }
            }
        }
    }

    fn deep_forward(&self, pixels: &[f32]) -> DeepTrace {
        let input: Vec<f64> = pixels.iter().map(|&v| f64::from(v)).collect();
        let mut channels = self.spec.memory_depth;
        let mut size = FRAME_SIZE;
        let mut conv: [Vec<f64>; 3] = Default::default();
        for (stage, &(out_c, k, s)) in CONV.iter().enumerate() {
            let src = if stage == 0 { &input } else { &conv[stage - 1] };
            let mut out = conv2d(
                src,
                channels,
                size,
                &self.params[2 * stage],
                &self.params[2 * stage + 1],
                k,
                s,
            );
            relu(&mut out);
            conv[stage] = out;
            channels = out_c;
            size = conv_out(size, k, s);
        }
        let mut hidden = vec![0.0; HIDDEN];
        affine(&self.params[6], &self.params[7], Input::Dense(&conv[2]), &mut hidden);
        relu(&mut hidden);
        DeepTrace {
            input,
            conv,
            hidden,
        }
    }

    fn deep_backward(
        &self,
        trace: &DeepTrace,
        d_motor: &[f64],
        d_sensory: &[f64],
        grads: &mut [Tensor],
    ) {
        let mut d_hidden = vec![0.0; HIDDEN];
        self.heads_backward(Input::Dense(&trace.hidden), 8, d_motor, d_sensory, grads, Some(&mut d_hidden));
        relu_backward(&trace.hidden, &mut d_hidden);

        let flat = &trace.conv[2];
        let mut d_flat = vec![0.0; flat.len()];
        let w = &self.params[6];
        for (o, &g) in d_hidden.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            grads[7].data[o] += g;
            let w_row = &w.data[o * flat.len()..(o + 1) * flat.len()];
            let g_row = &mut grads[6].data[o * flat.len()..(o + 1) * flat.len()];
            for i in 0..flat.len() {
                g_row[i] += g * flat[i];
                d_flat[i] += g * w_row[i];
            }
        }

        let sizes = {
            let mut s = [FRAME_SIZE; 4];
            for (i, &(_, k, st)) in CONV.iter().enumerate() {
                s[i + 1] = conv_out(s[i], k, st);
            }
            s
        };
        let mut d_out = d_flat;
        for stage in (0..3).rev() {
            relu_backward(&trace.conv[stage], &mut d_out);
            let (_, k, s) = CONV[stage];
            let in_c = if stage == 0 { self.spec.memory_depth } else { CONV[stage - 1].0 };
            let src = if stage == 0 { &trace.input } else { &trace.conv[stage - 1] };
            let need_input_grad = stage > 0;
            let (gw, rest) = grads[2 * stage..].split_at_mut(1);
            let d_in = conv2d_backward(
                src,
                in_c,
                sizes[stage],
                &self.params[2 * stage],
                k,
                s,
                &d_out,
                &mut gw[0],
                &mut rest[0],
                need_input_grad,
            );
            d_out = d_in;
        }
    }
}

fn affine(w: &Tensor, b: &Tensor, x: Input<'_>, out: &mut [f64]) {
    let cols = w.shape[1];
    for (o, y) in out.iter_mut().enumerate() {
        *y = b.data[o] + x.dot(&w.data[o * cols..(o + 1) * cols]);
    }
}

fn relu(v: &mut [f64]) {
    for x in v {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
}

/// Masks `grad` where the post-activation output was clamped.
fn relu_backward(activated: &[f64], grad: &mut [f64]) {
    for (g, &a) in grad.iter_mut().zip(activated) {
        if a <= 0.0 {
            *g = 0.0;
        }
    }
}

/// Valid (unpadded) strided convolution over a `[channels, size, size]` input.
fn conv2d(input: &[f64], channels: usize, size: usize, w: &Tensor, b: &Tensor, k: usize, stride: usize) -> Vec<f64> {
    let out_c = w.shape[0];
    let o = conv_out(size, k, stride);
    let mut out = vec![0.0; out_c * o * o];
    for co in 0..out_c {
        let plane = &mut out[co * o * o..(co + 1) * o * o];
        plane.fill(b.data[co]);
        for ci in 0..channels {
            let src = &input[ci * size * size..(ci + 1) * size * size];
            let kw = &w.data[(co * channels + ci) * k * k..(co * channels + ci + 1) * k * k];
            for oy in 0..o {
                for ox in 0..o {
                    let mut acc = 0.0;
                    for ky in 0..k {
                        let row = &src[(oy * stride + ky) * size + ox * stride..][..k];
                        let wrow = &kw[ky * k..(ky + 1) * k];
                        acc += row.iter().zip(wrow).map(|(a, b)| a * b).sum::<f64>();
                    }
                    plane[oy * o + ox] += acc;
                }
            }
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn conv2d_backward(
    input: &[f64],
    channels: usize,
    size: usize,
    w: &Tensor,
    k: usize,
    stride: usize,
    d_out: &[f64],
    d_w: &mut Tensor,
    d_b: &mut Tensor,
    input_grad: bool,
) -> Vec<f64> {
    let out_c = w.shape[0];
    let o = conv_out(size, k, stride);
    let mut d_in = if input_grad { vec![0.0; channels * size * size] } else { Vec::new() };
    for co in 0..out_c {
        let g_plane = &d_out[co * o * o..(co + 1) * o * o];
        d_b.data[co] += g_plane.iter().sum::<f64>();
        for ci in 0..channels {
            let src = &input[ci * size * size..(ci + 1) * size * size];
            let off = (co * channels + ci) * k * k;
            for oy in 0..o {
                for ox in 0..o {
                    let g = g_plane[oy * o + ox];
                    if g == 0.0 {
                        continue;
                    }
                    for ky in 0..k {
                        let base = (oy * stride + ky) * size + ox * stride;
                        for kx in 0..k {
                            d_w.data[off + ky * k + kx] += g * src[base + kx];
                        }
                        if input_grad {
                            for kx in 0..k {
                                d_in[ci * size * size + base + kx] += g * w.data[off + ky * k + kx];
                            }
                        }
                    }
                }
            }
        }
    }
    d_in
}
