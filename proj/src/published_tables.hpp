#pragma once

namespace ratiocp::published {

// Printed values, rows ordered n in {200, 500, 1000} x level in {0.10, 0.05, 0.01}.
// The last two rows of T7 are printed with n = 200; they belong to n = 1000.
constexpr double kArPrinted[7][9][9] = {
    {  // T1
        {0.148, 0.154, 0.164, 0.183, 0.204, 0.233, 0.273, 0.338, 0.230},
        {0.088, 0.089, 0.108, 0.120, 0.136, 0.158, 0.204, 0.265, 0.152},
        {0.023, 0.024, 0.032, 0.040, 0.051, 0.069, 0.094, 0.143, 0.072},
        {0.116, 0.121, 0.125, 0.154, 0.152, 0.166, 0.205, 0.235, 0.326},
        {0.061, 0.066, 0.067, 0.078, 0.087, 0.102, 0.133, 0.157, 0.244},
        {0.013, 0.016, 0.017, 0.019, 0.024, 0.036, 0.051, 0.058, 0.012},
        {0.120, 0.100, 0.110, 0.120, 0.130, 0.150, 0.168, 0.200, 0.230},
        {0.072, 0.048, 0.052, 0.058, 0.062, 0.070, 0.096, 0.116, 0.152},
        {0.016, 0.004, 0.004, 0.004, 0.008, 0.010, 0.018, 0.022, 0.072},
    },
    {  // T2
        {0.586, 0.528, 0.474, 0.420, 0.379, 0.366, 0.357, 0.385, 0.488},
        {0.467, 0.414, 0.367, 0.325, 0.289, 0.271, 0.270, 0.301, 0.411},
        {0.261, 0.223, 0.192, 0.165, 0.147, 0.131, 0.137, 0.166, 0.260},
        {0.868, 0.806, 0.720, 0.623, 0.525, 0.431, 0.359, 0.311, 0.349},
        {0.779, 0.669, 0.608, 0.509, 0.408, 0.326, 0.263, 0.223, 0.267},
        {0.551, 0.453, 0.369, 0.282, 0.212, 0.158, 0.122, 0.104, 0.137},
        {0.974, 0.940, 0.892, 0.836, 0.700, 0.558, 0.424, 0.358, 0.308},
        {0.940, 0.892, 0.838, 0.710, 0.592, 0.452, 0.306, 0.272, 0.216},
        {0.818, 0.700, 0.596, 0.492, 0.362, 0.254, 0.148, 0.128, 0.118},
    },
    {  // T3
        {0.962, 0.929, 0.880, 0.807, 0.718, 0.613, 0.523, 0.465, 0.511},
        {0.919, 0.872, 0.805, 0.720, 0.616, 0.516, 0.427, 0.381, 0.430},
        {0.775, 0.694, 0.604, 0.505, 0.4112, 0.325, 0.265, 0.230, 0.277},
        {0.999, 0.999, 0.993, 0.976, 0.935, 0.840, 0.686, 0.494, 0.406},
        {0.999, 0.993, 0.981, 0.947, 0.877, 0.756, 0.577, 0.398, 0.321},
        {0.980, 0.957, 0.905, 0.819, 0.702, 0.533, 0.356, 0.230, 0.182},
        {1, 1, 1, 0.998, 0.992, 0.954, 0.846, 0.592, 0.350},
        {1, 1, 1, 0.994, 0.974, 0.918, 0.756, 0.496, 0.290},
        {1, 0.996, 0.988, 0.966, 0.890, 0.776, 0.536, 0.302, 0.144},
    },
    {  // T4
        {0.999, 0.997, 0.989, 0.970, 0.925, 0.842, 0.719, 0.594, 0.553},
        {0.996, 0.987, 0.972, 0.937, 0.871, 0.764, 0.630, 0.501, 0.471},
        {0.969, 0.938, 0.889, 0.812, 0.706, 0.572, 0.440, 0.341, 0.327},
        {1, 1, 1, 1, 0.997, 0.977, 0.904, 0.717, 0.493},
        {1, 1, 1, 0.998, 0.989, 0.952, 0.838, 0.622, 0.402},
        {1, 0.999, 0.995, 0.982, 0.941, 0.837, 0.661, 0.410, 0.248},
        {1, 1, 1, 1, 1, 0.998, 0.984, 0.860, 0.572},
        {1, 1, 1, 1, 1, 0.998, 0.964, 0.788, 0.460},
        {1, 1, 1, 1, 0.996, 0.970, 0.876, 0.606, 0.270},
    },
    {  // T5
        {0.563, 0.512, 0.461, 0.415, 0.378, 0.350, 0.346, 0.387, 0.492},
        {0.443, 0.396, 0.349, 0.308, 0.275, 0.256, 0.256, 0.294, 0.414},
        {0.229, 0.198, 0.174, 0.149, 0.130, 0.121, 0.124, 0.159, 0.268},
        {0.836, 0.772, 0.687, 0.591, 0.499, 0.405, 0.341, 0.299, 0.347},
        {0.744, 0.662, 0.567, 0.474, 0.383, 0.308, 0.246, 0.216, 0.260},
        {0.496, 0.411, 0.331, 0.258, 0.195, 0.139, 0.108, 0.097, 0.138},
        {0.964, 0.946, 0.894, 0.812, 0.698, 0.556, 0.412, 0.300, 0.268},
        {0.942, 0.890, 0.814, 0.706, 0.580, 0.428, 0.310, 0.226, 0.176},
        {0.798, 0.694, 0.592, 0.450, 0.328, 0.228, 0.150, 0.090, 0.082},
    },
    {  // T6
        {0.948, 0.912, 0.857, 0.785, 0.694, 0.591, 0.504, 0.463, 0.517},
        {0.901, 0.846, 0.781, 0.693, 0.589, 0.494, 0.415, 0.375, 0.436},
        {0.739, 0.659, 0.565, 0.474, 0.385, 0.308, 0.250, 0.228, 0.291},
        {0.999, 0.997, 0.987, 0.968, 0.911, 0.808, 0.657, 0.491, 0.404},
        {0.997, 0.988, 0.972, 0.927, 0.846, 0.721, 0.550, 0.391, 0.318},
        {0.968, 0.934, 0.873, 0.781, 0.653, 0.495, 0.344, 0.223, 0.182},
        {1, 1, 1, 0.998, 0.994, 0.952, 0.820, 0.590, 0.368},
        {1, 1, 0.998, 0.996, 0.980, 0.904, 0.730, 0.464, 0.278},
        {0.998, 0.994, 0.962, 0.874, 0.726, 0.488, 0.266, 0.126, 0.082},
    },
    {  // T7
        {0.999, 0.995, 0.984, 0.962, 0.909, 0.830, 0.712, 0.598, 0.566},
        {0.993, 0.983, 0.968, 0.922, 0.854, 0.753, 0.624, 0.505, 0.483},
        {0.961, 0.923, 0.871, 0.795, 0.682, 0.556, 0.429, 0.340, 0.343},
        {1, 1, 1, 0.999, 0.994, 0.966, 0.874, 0.695, 0.499},
        {1, 1, 0.999, 0.995, 0.982, 0.931, 0.808, 0.601, 0.402},
        {0.999, 0.997, 0.990, 0.966, 0.915, 0.803, 0.622, 0.409, 0.239},
        {1, 1, 1, 1, 1, 0.998, 0.974, 0.826, 0.472},
        {1, 1, 1, 1, 1, 0.994, 0.944, 0.732, 0.386},
        {1, 1, 1, 1, 0.992, 0.952, 0.814, 0.522, 0.230},
    },
};

// Delta in {0, 0.5, 1, 1.5}; the Delta = 0 column is the simulated size.
constexpr double kGarchPrinted[2][9][4] = {
    {  // T8
        {0.182, 0.615, 0.968, 0.999},
        {0.07, 0.499, 0.962, 0.997},
        {0.02, 0.270, 0.802, 0.975},
        {0.114, 1, 1, 1},
        {0.06, 1, 1, 1},
        {0.01, 0.600, 0.984, 0.999},
        {0.116, 0.982, 1, 1},
        {0.06, 0.962, 1, 1},
        {0.01, 0.850, 1, 1},
    },
    {  // T9
        {0.128, 0.478, 0.967, 0.995},
        {0.071, 0.372, 0.842, 0.985},
        {0.018, 0.179, 0.637, 0.916},
        {0.107, 0.775, 0.998, 1},
        {0.060, 0.663, 0.990, 1},
        {0.012, 0.423, 0.938, 0.998},
        {0.116, 0.954, 1, 1},
        {0.064, 0.892, 1, 1},
        {0.008, 0.744, 0.998, 1},
    },
};

}  // namespace ratiocp::published
