#pragma once

#include "sclera/nn/losses.hpp"
#include "sclera/nn/network.hpp"
#include "sclera/nn/optim.hpp"
#include "sclera/nn/sequential.hpp"

namespace sclera::train {

struct GanLosses {
  double generator = 0.0;      // adversarial + lambda * L1
  double adversarial = 0.0;
  double l1 = 0.0;
  double discriminator = 0.0;  // BCE(real) + BCE(fake)
};

/// One alternating conditional-GAN update. The discriminator sees
/// [image, target] as real and [image, G(image)] as fake; then the generator
/// is pushed to fool the updated discriminator while staying close to the
/// target in L1. `clip_norm` <= 0 disables gradient clipping.
template <typename Scalar>
GanLosses gan_step(nn::Network<Scalar>& generator, nn::Network<Scalar>& discriminator, nn::Adam<Scalar>& g_opt,
                   nn::Adam<Scalar>& d_opt, const Tensor<Scalar>& image, const Tensor<Scalar>& target,
                   double lambda_l1, double clip_norm = 0.0) {
  GanLosses out;
  const Tensor<Scalar> fake = generator.forward(image, nn::Mode::Train);

  d_opt.zero_grad();
  const auto real_logits = discriminator.forward(nn::concat_channels(image, target), nn::Mode::Train);
  const auto real = nn::bce_with_logits(real_logits, Scalar(1));
  discriminator.backward(real.grad);
  const auto fake_logits = discriminator.forward(nn::concat_channels(image, fake), nn::Mode::Train);
  const auto fooled = nn::bce_with_logits(fake_logits, Scalar(0));
  discriminator.backward(fooled.grad);
  out.discriminator = static_cast<double>(real.value) + static_cast<double>(fooled.value);
  if (clip_norm > 0.0) nn::clip_grad_norm(discriminator.parameters(), clip_norm);
  d_opt.step();

  g_opt.zero_grad();
  const auto judged = discriminator.forward(nn::concat_channels(image, fake), nn::Mode::Train);
  const auto adv = nn::bce_with_logits(judged, Scalar(1));
  const auto g_pair = discriminator.backward(adv.grad);
  Tensor<Scalar> g_fake = nn::split_channels(g_pair, image.channels()).second;
  const auto rec = nn::l1_loss(fake, target);
  if (lambda_l1 > 0.0) g_fake.values() += static_cast<Scalar>(lambda_l1) * rec.grad.values();
  generator.backward(g_fake);
  if (clip_norm > 0.0) nn::clip_grad_norm(generator.parameters(), clip_norm);
  g_opt.step();
  discriminator.zero_grad();

  out.adversarial = static_cast<double>(adv.value);
  out.l1 = static_cast<double>(rec.value);
  out.generator = out.adversarial + lambda_l1 * out.l1;
  return out;
}

}  // namespace sclera::train
