"""Generated by scripts/generate_qalpha_table.py; do not edit by hand.

Upper quantiles q_alpha of the studentized range distribution with
infinite degrees of freedom, for group counts 2..50.
"""

Q_ALPHA = {
    0.05: {
        2: 2.77180764868531,
        3: 3.3144931553851436,
        4: 3.633159574890258,
        5: 3.8576555103666648,
        6: 4.030092053168925,
        7: 4.169554154995142,
        8: 4.286309409337839,
        9: 4.38650911548433,
        10: 4.474124221715011,
        11: 4.551863584055205,
        12: 4.62165547185786,
        13: 4.68491984730294,
        14: 4.742731707674231,
        15: 4.7959238604208,
        16: 4.845154183947029,
        17: 4.890951125566545,
        18: 4.933745358116745,
        19: 4.973892348738188,
        20: 5.0116887941083785,
        21: 5.047384814998754,
        22: 5.081193155789949,
        23: 5.11329622826206,
        24: 5.143851577237273,
        25: 5.17299617311976,
        26: 5.200849820270566,
        27: 5.227517890544645,
        28: 5.253093535795804,
        29: 5.277659493828541,
        30: 5.301289574021514,
        31: 5.324049888280587,
        32: 5.345999877827062,
        33: 5.367193175037556,
        34: 5.387678331053541,
        35: 5.407499433418613,
        36: 5.426696633046859,
        37: 5.4453065959927756,
        38: 5.463362892505192,
        39: 5.480896333500203,
        40: 5.49793526273136,
        41: 5.514505811456942,
        42: 5.530632121219307,
        43: 5.546336539396508,
        44: 5.56163979141237,
        45: 5.576561132860453,
        46: 5.591118484280807,
        47: 5.605328550903337,
        48: 5.6192069293200575,
        49: 5.632768202756774,
        50: 5.646026026371338,
    },
    0.1: {
        2: 2.3261743073458065,
        3: 2.9023802134212637,
        4: 3.240446220920701,
        5: 3.4782805506966374,
        6: 3.6607209417144944,
        7: 3.808098257019884,
        8: 3.9313491004625885,
        9: 4.037023130231793,
        10: 4.129346398231041,
        11: 4.211200246537038,
        12: 4.284634603688334,
        13: 4.351158198627797,
        14: 4.411912622162101,
        15: 4.467781815928399,
        16: 4.519463704835571,
        17: 4.5675186362726645,
        18: 4.612403071811313,
        19: 4.65449359865169,
        20: 4.694104409485153,
        21: 4.73150026775712,
        22: 4.766906285339175,
        23: 4.800515406545616,
        24: 4.832494213508166,
        25: 4.86298748410098,
        26: 4.892121809929442,
        27: 4.920008497112336,
        28: 4.946745913470274,
        29: 4.972421403869136,
        30: 4.9971128653964865,
        31: 5.020890052164715,
        32: 5.043815663415193,
        33: 5.065946256590582,
        34: 5.087333018005472,
        35: 5.108022416877672,
        36: 5.128056763215868,
        37: 5.147474685986369,
        38: 5.166311544806648,
        39: 5.184599785919946,
        40: 5.202369251233154,
        41: 5.219647447630226,
        42: 5.2364597825156505,
        43: 5.252829770528878,
        44: 5.268779215549248,
        45: 5.284328371441688,
        46: 5.299496084445485,
        47: 5.314299919657463,
        48: 5.3287562736882474,
        49: 5.342880475260825,
        50: 5.356686875262577,
    },
}
