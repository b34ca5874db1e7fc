// Generated by scripts/gen_class_numbers.py; do not edit.
// (d, h) for squarefree d < 0 with |disc| <= 1000.
pub(crate) static CLASS_NUMBERS: [(i64, u32); 305] = [
    (-1, 1), (-2, 1), (-3, 1), (-5, 2), (-6, 2), (-7, 1),
    (-10, 2), (-11, 1), (-13, 2), (-14, 4), (-15, 2), (-17, 4),
    (-19, 1), (-21, 4), (-22, 2), (-23, 3), (-26, 6), (-29, 6),
    (-30, 4), (-31, 3), (-33, 4), (-34, 4), (-35, 2), (-37, 2),
    (-38, 6), (-39, 4), (-41, 8), (-42, 4), (-43, 1), (-46, 4),
    (-47, 5), (-51, 2), (-53, 6), (-55, 4), (-57, 4), (-58, 2),
    (-59, 3), (-61, 6), (-62, 8), (-65, 8), (-66, 8), (-67, 1),
    (-69, 8), (-70, 4), (-71, 7), (-73, 4), (-74, 10), (-77, 8),
    (-78, 4), (-79, 5), (-82, 4), (-83, 3), (-85, 4), (-86, 10),
    (-87, 6), (-89, 12), (-91, 2), (-93, 4), (-94, 8), (-95, 8),
    (-97, 4), (-101, 14), (-102, 4), (-103, 5), (-105, 8), (-106, 6),
    (-107, 3), (-109, 6), (-110, 12), (-111, 8), (-113, 8), (-114, 8),
    (-115, 2), (-118, 6), (-119, 10), (-122, 10), (-123, 2), (-127, 5),
    (-129, 12), (-130, 4), (-131, 5), (-133, 4), (-134, 14), (-137, 8),
    (-138, 8), (-139, 3), (-141, 8), (-142, 4), (-143, 10), (-145, 8),
    (-146, 16), (-149, 14), (-151, 7), (-154, 8), (-155, 4), (-157, 6),
    (-158, 8), (-159, 10), (-161, 16), (-163, 1), (-165, 8), (-166, 10),
    (-167, 11), (-170, 12), (-173, 14), (-174, 12), (-177, 4), (-178, 8),
    (-179, 5), (-181, 10), (-182, 12), (-183, 8), (-185, 16), (-186, 12),
    (-187, 2), (-190, 4), (-191, 13), (-193, 4), (-194, 20), (-195, 4),
    (-197, 10), (-199, 9), (-201, 12), (-202, 6), (-203, 4), (-205, 8),
    (-206, 20), (-209, 20), (-210, 8), (-211, 3), (-213, 8), (-214, 6),
    (-215, 14), (-217, 8), (-218, 10), (-219, 4), (-221, 16), (-222, 12),
    (-223, 7), (-226, 8), (-227, 5), (-229, 10), (-230, 20), (-231, 12),
    (-233, 12), (-235, 2), (-237, 12), (-238, 8), (-239, 15), (-241, 12),
    (-246, 12), (-247, 6), (-249, 12), (-251, 7), (-255, 12), (-259, 4),
    (-263, 13), (-267, 2), (-271, 11), (-283, 3), (-287, 14), (-291, 4),
    (-295, 8), (-299, 8), (-303, 10), (-307, 3), (-311, 19), (-319, 10),
    (-323, 4), (-327, 12), (-331, 3), (-335, 18), (-339, 6), (-347, 5),
    (-355, 4), (-359, 19), (-367, 9), (-371, 8), (-379, 3), (-383, 17),
    (-391, 14), (-395, 8), (-399, 16), (-403, 2), (-407, 16), (-411, 6),
    (-415, 10), (-419, 9), (-427, 2), (-431, 21), (-435, 4), (-439, 15),
    (-443, 5), (-447, 14), (-451, 6), (-455, 20), (-463, 7), (-467, 7),
    (-471, 16), (-479, 25), (-483, 4), (-487, 7), (-491, 9), (-499, 3),
    (-503, 21), (-511, 14), (-515, 6), (-519, 18), (-523, 5), (-527, 18),
    (-535, 14), (-543, 12), (-547, 3), (-551, 26), (-555, 4), (-559, 16),
    (-563, 9), (-571, 5), (-579, 8), (-583, 8), (-587, 7), (-591, 22),
    (-595, 4), (-599, 25), (-607, 13), (-611, 10), (-615, 20), (-619, 5),
    (-623, 22), (-627, 4), (-631, 13), (-635, 10), (-643, 3), (-647, 23),
    (-651, 8), (-655, 12), (-659, 11), (-663, 16), (-667, 4), (-671, 30),
    (-679, 18), (-683, 5), (-687, 12), (-691, 5), (-695, 24), (-699, 10),
    (-703, 14), (-707, 6), (-715, 4), (-719, 31), (-723, 4), (-727, 13),
    (-731, 12), (-739, 5), (-743, 21), (-751, 15), (-755, 12), (-759, 24),
    (-763, 4), (-767, 22), (-771, 6), (-779, 10), (-787, 5), (-791, 32),
    (-795, 4), (-799, 16), (-803, 10), (-807, 14), (-811, 7), (-815, 30),
    (-823, 9), (-827, 7), (-831, 28), (-835, 6), (-839, 33), (-843, 6),
    (-851, 10), (-859, 7), (-863, 21), (-871, 22), (-879, 22), (-883, 3),
    (-887, 29), (-895, 16), (-899, 14), (-903, 16), (-907, 3), (-911, 31),
    (-915, 8), (-919, 19), (-923, 10), (-935, 28), (-939, 8), (-943, 16),
    (-947, 5), (-951, 26), (-955, 4), (-959, 36), (-967, 11), (-971, 15),
    (-979, 8), (-983, 27), (-987, 8), (-991, 17), (-995, 8),
];
