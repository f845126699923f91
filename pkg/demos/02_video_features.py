"""Frame similarity, the 12 aggregated video features, key frames and summary frames."""

import numpy as np

from playtriage.synthetic import scene_frames
from playtriage.vision import (extract_keyframes, frame_pair_series, hsv_hist, pearson, ssim,
                               summary_frame, video_features)

black = np.zeros((16, 16, 3), np.uint8)
white = np.full((16, 16, 3), 255, np.uint8)

# %% SSIM on luma with 8x8 windows; black vs white is C1 / (255^2 + C1)
print("ssim(black, black) =", ssim(black, black))
print("ssim(black, white) =", ssim(black, white))

# %% hue x saturation histogram (50 x 60 bins) and its correlation
h = hsv_hist(scene_frames((200, 40, 40), 1)[0])
print("non-empty bins:", np.count_nonzero(h), "sum:", h.sum())
print("pearson([1,2,3], [1,3,2]) =", pearson([1, 2, 3], [1, 3, 2]))

# %% a noisy red scene followed by a cut to blue
frames = scene_frames((200, 40, 40), 5, seed=1) + scene_frames((40, 40, 200), 5, seed=2)
series = frame_pair_series(frames)
print("s   =", np.round(series.s, 3))
print("hsv =", np.round(series.hsv, 3))
for name, value in video_features(frames).items():
    print(f"{name:12s} {value: .4f}")

# %% key frames (SSIM to the last key frame below 0.7) and their pixel average
keys = extract_keyframes(frames)
print("key frames:", len(keys))
print("summary frame mean colour:", summary_frame(keys).reshape(-1, 3).mean(axis=0).round(1))
