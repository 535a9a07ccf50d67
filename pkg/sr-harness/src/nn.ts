/**
 * A small 3-D convolutional residual network with its own training loop.
 *
 * Architecture: conv(1->C) + ReLU, (L-2) x [conv(C->C) + ReLU], conv(C->1),
 * and a global residual connection (output = input + stack(input)), so the
 * net refines a nearest-replicated low-resolution volume toward the
 * high-resolution target. All kernels are 3x3x3 with zero padding, MSE
 * loss, Adam updates. Everything is Float64 and seeded, so two runs with
 * the same seed produce identical loss curves.
 */

import { Rng } from "./rng.js";

const K = 3; // kernel edge
const PAD = 1;

export interface Tensor3 {
  data: Float64Array; // [d][h][w][c]
  d: number;
  h: number;
  w: number;
  c: number;
}

export function tensor3(d: number, h: number, w: number, c: number): Tensor3 {
  return { data: new Float64Array(d * h * w * c), d, h, w, c };
}

export interface ConvLayer {
  cin: number;
  cout: number;
  weights: Float64Array; // [kd][kh][kw][cin][cout]
  bias: Float64Array; // [cout]
  gradWeights: Float64Array;
  gradBias: Float64Array;
  mW: Float64Array;
  vW: Float64Array;
  mB: Float64Array;
  vB: Float64Array;
}

export function makeConv(cin: number, cout: number, rng: Rng): ConvLayer {
  const nW = K * K * K * cin * cout;
  const weights = new Float64Array(nW);
  const scale = Math.sqrt(2 / (K * K * K * cin)); // He init for ReLU stacks
  for (let i = 0; i < nW; i++) weights[i] = rng.gauss() * scale;
  return {
    cin,
    cout,
    weights,
    bias: new Float64Array(cout),
    gradWeights: new Float64Array(nW),
    gradBias: new Float64Array(cout),
    mW: new Float64Array(nW),
    vW: new Float64Array(nW),
    mB: new Float64Array(cout),
    vB: new Float64Array(cout),
  };
}

export function convForward(layer: ConvLayer, input: Tensor3, output: Tensor3): void {
  const { d, h, w } = input;
  const cin = layer.cin;
  const cout = layer.cout;
  const inData = input.data;
  const outData = output.data;
  const weights = layer.weights;
  const bias = layer.bias;
  for (let z = 0; z < d; z++) {
    for (let y = 0; y < h; y++) {
      for (let x = 0; x < w; x++) {
        const outBase = ((z * h + y) * w + x) * cout;
        for (let co = 0; co < cout; co++) outData[outBase + co] = bias[co];
        for (let kd = 0; kd < K; kd++) {
          const iz = z + kd - PAD;
          if (iz < 0 || iz >= d) continue;
          for (let kh = 0; kh < K; kh++) {
            const iy = y + kh - PAD;
            if (iy < 0 || iy >= h) continue;
            for (let kw = 0; kw < K; kw++) {
              const ix = x + kw - PAD;
              if (ix < 0 || ix >= w) continue;
              const inBase = ((iz * h + iy) * w + ix) * cin;
              let wBase = (((kd * K + kh) * K + kw) * cin) * cout;
              for (let ci = 0; ci < cin; ci++) {
                const a = inData[inBase + ci];
                if (a !== 0) {
                  for (let co = 0; co < cout; co++) {
                    outData[outBase + co] += a * weights[wBase + co];
                  }
                }
                wBase += cout;
              }
            }
          }
        }
      }
    }
  }
}

/** Input gradients and weight/bias gradient accumulation in one sweep. */
export function convBackward(
  layer: ConvLayer,
  input: Tensor3,
  gradOut: Tensor3,
  gradIn: Tensor3 | null,
): void {
  const { d, h, w } = input;
  const cin = layer.cin;
  const cout = layer.cout;
  const inData = input.data;
  const goData = gradOut.data;
  const weights = layer.weights;
  const gW = layer.gradWeights;
  const gB = layer.gradBias;
  const giData = gradIn ? gradIn.data : null;
  if (giData) giData.fill(0);
  for (let z = 0; z < d; z++) {
    for (let y = 0; y < h; y++) {
      for (let x = 0; x < w; x++) {
        const outBase = ((z * h + y) * w + x) * cout;
        for (let co = 0; co < cout; co++) gB[co] += goData[outBase + co];
        for (let kd = 0; kd < K; kd++) {
          const iz = z + kd - PAD;
          if (iz < 0 || iz >= d) continue;
          for (let kh = 0; kh < K; kh++) {
            const iy = y + kh - PAD;
            if (iy < 0 || iy >= h) continue;
            for (let kw = 0; kw < K; kw++) {
              const ix = x + kw - PAD;
              if (ix < 0 || ix >= w) continue;
              const inBase = ((iz * h + iy) * w + ix) * cin;
              let wBase = (((kd * K + kh) * K + kw) * cin) * cout;
              for (let ci = 0; ci < cin; ci++) {
                const a = inData[inBase + ci];
                let acc = 0;
                if (a !== 0) {
                  for (let co = 0; co < cout; co++) {
                    const g = goData[outBase + co];
                    gW[wBase + co] += a * g;
                    acc += weights[wBase + co] * g;
                  }
                } else if (giData) {
                  for (let co = 0; co < cout; co++) {
                    acc += weights[wBase + co] * goData[outBase + co];
                  }
                }
                if (giData) giData[inBase + ci] += acc;
                wBase += cout;
              }
            }
          }
        }
      }
    }
  }
}

function reluForward(t: Tensor3): void {
  const data = t.data;
  for (let i = 0; i < data.length; i++) if (data[i] < 0) data[i] = 0;
}

function reluBackward(activation: Tensor3, grad: Tensor3): void {
  const a = activation.data;
  const g = grad.data;
  for (let i = 0; i < g.length; i++) if (a[i] === 0) g[i] = 0;
}

export interface AdamParams {
  learningRate: number;
  beta1: number;
  beta2: number;
  epsilon: number;
}

export const ADAM_DEFAULTS: Omit<AdamParams, "learningRate"> = {
  beta1: 0.9,
  beta2: 0.999,
  epsilon: 1e-8,
};

function adamStep(
  params: Float64Array,
  grads: Float64Array,
  m: Float64Array,
  v: Float64Array,
  t: number,
  opt: AdamParams,
): void {
  const { learningRate, beta1, beta2, epsilon } = opt;
  const bc1 = 1 - Math.pow(beta1, t);
  const bc2 = 1 - Math.pow(beta2, t);
  for (let i = 0; i < params.length; i++) {
    const g = grads[i];
    m[i] = beta1 * m[i] + (1 - beta1) * g;
    v[i] = beta2 * v[i] + (1 - beta2) * g * g;
    params[i] -= (learningRate * (m[i] / bc1)) / (Math.sqrt(v[i] / bc2) + epsilon);
  }
}

export class ResidualNet {
  readonly layers: ConvLayer[];
  readonly channels: number;
  private step = 0;

  constructor(channels: number, depth: number, seed: number) {
    if (depth < 2) throw new Error("need at least 2 conv layers");
    const rng = new Rng(seed ^ 0x5eed);
    this.channels = channels;
    this.layers = [];
    this.layers.push(makeConv(1, channels, rng.fork(0)));
    for (let i = 1; i < depth - 1; i++) {
      this.layers.push(makeConv(channels, channels, rng.fork(i)));
    }
    this.layers.push(makeConv(channels, 1, rng.fork(depth - 1)));
  }

  parameterCount(): number {
    return this.layers.reduce((s, l) => s + l.weights.length + l.bias.length, 0);
  }

  /** Forward pass keeping activations (needed for backward). */
  private forwardActivations(input: Tensor3): Tensor3[] {
    const { d, h, w } = input;
    const acts: Tensor3[] = [input];
    for (let i = 0; i < this.layers.length; i++) {
      const out = tensor3(d, h, w, this.layers[i].cout);
      convForward(this.layers[i], acts[i], out);
      if (i < this.layers.length - 1) reluForward(out);
      acts.push(out);
    }
    return acts;
  }

  /**
   * Prediction = input + refinement; input is a single-channel tensor.
   * Forward-only: activations are not retained, so whole volumes fit.
   */
  infer(input: Tensor3): Tensor3 {
    const { d, h, w } = input;
    let current = input;
    for (let i = 0; i < this.layers.length; i++) {
      const out = tensor3(d, h, w, this.layers[i].cout);
      convForward(this.layers[i], current, out);
      if (i < this.layers.length - 1) reluForward(out);
      current = out;
    }
    const result = tensor3(d, h, w, 1);
    for (let i = 0; i < result.data.length; i++) {
      result.data[i] = input.data[i] + current.data[i];
    }
    return result;
  }

  /** Batch MSE loss without touching gradients or parameters. */
  batchLoss(batch: Array<{ lr: Tensor3; hr: Tensor3 }>): number {
    let lossAcc = 0;
    let elementCount = 0;
    for (const { lr, hr } of batch) {
      const prediction = this.infer(lr);
      for (let i = 0; i < hr.data.length; i++) {
        const diff = prediction.data[i] - hr.data[i];
        lossAcc += diff * diff;
      }
      elementCount += hr.data.length;
    }
    return lossAcc / elementCount;
  }

  /**
   * Batch MSE loss plus parameter gradients accumulated into each layer's
   * gradWeights/gradBias (per-sample losses averaged over the batch).
   */
  lossAndGradients(batch: Array<{ lr: Tensor3; hr: Tensor3 }>): number {
    for (const layer of this.layers) {
      layer.gradWeights.fill(0);
      layer.gradBias.fill(0);
    }
    let lossAcc = 0;
    let elementCount = 0;
    for (const { lr, hr } of batch) {
      const acts = this.forwardActivations(lr);
      const refinement = acts[acts.length - 1];
      const n = hr.data.length;
      // d(meanMSE)/d(pred) = 2 * (pred - target) / (n * batchSize)
      const gradOut = tensor3(lr.d, lr.h, lr.w, 1);
      for (let i = 0; i < n; i++) {
        const pred = lr.data[i] + refinement.data[i];
        const diff = pred - hr.data[i];
        lossAcc += diff * diff;
        gradOut.data[i] = (2 * diff) / (n * batch.length);
      }
      elementCount += n;
      // backprop through the conv stack (the residual skip carries no weights)
      let grad = gradOut;
      for (let i = this.layers.length - 1; i >= 0; i--) {
        if (i < this.layers.length - 1) reluBackward(acts[i + 1], grad);
        const gradIn = i > 0 ? tensor3(lr.d, lr.h, lr.w, this.layers[i].cin) : null;
        convBackward(this.layers[i], acts[i], grad, gradIn);
        if (gradIn) grad = gradIn;
      }
    }
    return lossAcc / elementCount;
  }

  /**
   * One optimization step over a batch of (lr, hr) patch pairs.
   * Returns the batch MSE loss (computed before the update).
   */
  trainStep(batch: Array<{ lr: Tensor3; hr: Tensor3 }>, opt: AdamParams): number {
    const loss = this.lossAndGradients(batch);
    if (!Number.isFinite(loss)) {
      throw new Error(
        `non-finite loss at optimizer step ${this.step + 1}: ${loss}; ` +
          "lower the learning rate or check the input data",
      );
    }
    this.step += 1;
    for (const layer of this.layers) {
      adamStep(layer.weights, layer.gradWeights, layer.mW, layer.vW, this.step, opt);
      adamStep(layer.bias, layer.gradBias, layer.mB, layer.vB, this.step, opt);
    }
    return loss;
  }
}
