//! Per-layer capture of activations and, after a backward pass, gradients.

use super::Tensor;

/// One layer's stored forward data plus backward gradients.
#[derive(Debug, Clone)]
pub struct LayerTrace {
    pub name: &'static str,
    pub input: Tensor,
    /// Pre-nonlinearity values, when the layer has a separate nonlinearity.
    pub pre_activation: Option<Tensor>,
    pub output: Tensor,
    /// Gradient of the backward objective w.r.t. `output`. Present only
    /// after a backward pass.
    pub grad_output: Option<Tensor>,
    /// Gradient w.r.t. `input`.
    pub grad_input: Option<Tensor>,
}

impl LayerTrace {
    pub fn new(name: &'static str, input: Tensor, output: Tensor) -> Self {
        LayerTrace {
            name,
            input,
            pre_activation: None,
            output,
            grad_output: None,
            grad_input: None,
        }
    }
}

/// Ordered layer traces from one forward pass; layers align one-to-one with
/// the network that produced them.
#[derive(Debug, Clone, Default)]
pub struct NetworkTrace {
    pub layers: Vec<LayerTrace>,
}

impl NetworkTrace {
    pub fn push(&mut self, layer: LayerTrace) {
        self.layers.push(layer);
    }

    pub fn layer(&self, name: &str) -> Option<&LayerTrace> {
        self.layers.iter().find(|l| l.name == name)
    }

    /// Logits are the last layer's output.
    pub fn logits(&self) -> Option<&[f64]> {
        self.layers.last().map(|l| l.output.data())
    }

    pub fn has_gradients(&self) -> bool {
        self.layers.iter().all(|l| l.grad_output.is_some())
    }
}
